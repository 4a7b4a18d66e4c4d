#include <cmc/oracle.hpp>

#include <deque>
#include <stdexcept>

namespace cmc::oracle {

ConcreteState initial_state(const Cfa& cfa) {
    ConcreteState c;
    c.pc = cfa.initial();
    for(const auto& v : cfa.variables())
        c.store[v] = 0;
    return c;
}

Value eval(const Expr& e, const std::map<std::string, Value>& store) {
    switch(e.kind()) {
    case ExprKind::Const: return e.value();
    case ExprKind::Var: return store.at(e.name());
    case ExprKind::Neg: return -eval(e.operand(), store);
    case ExprKind::Add: return eval(e.lhs(), store) + eval(e.rhs(), store);
    case ExprKind::Sub: return eval(e.lhs(), store) - eval(e.rhs(), store);
    case ExprKind::Mul: return eval(e.lhs(), store) * eval(e.rhs(), store);
    default: throw std::logic_error("not a term: " + e.str());
    }
}

bool holds(const Expr& e, const std::map<std::string, Value>& store) {
    switch(e.kind()) {
    case ExprKind::True: return true;
    case ExprKind::False: return false;
    case ExprKind::Not: return !holds(e.operand(), store);
    case ExprKind::And: return holds(e.lhs(), store) && holds(e.rhs(), store);
    case ExprKind::Or: return holds(e.lhs(), store) || holds(e.rhs(), store);
    case ExprKind::Lt: return eval(e.lhs(), store) < eval(e.rhs(), store);
    case ExprKind::Le: return eval(e.lhs(), store) <= eval(e.rhs(), store);
    case ExprKind::Eq: return eval(e.lhs(), store) == eval(e.rhs(), store);
    case ExprKind::Ne: return eval(e.lhs(), store) != eval(e.rhs(), store);
    case ExprKind::Ge: return eval(e.lhs(), store) >= eval(e.rhs(), store);
    case ExprKind::Gt: return eval(e.lhs(), store) > eval(e.rhs(), store);
    default: throw std::logic_error("not a condition: " + e.str());
    }
}

std::optional<ConcreteState> step(const ConcreteState& c, const Edge& g) {
    if(c.pc != g.source)
        return std::nullopt;
    ConcreteState next = c;
    next.pc = g.target;
    if(const auto* a = std::get_if<Assign>(&g.op)) {
        next.store[a->var] = eval(a->term, c.store);
        return next;
    }
    if(const auto* a = std::get_if<Assume>(&g.op)) {
        if(!holds(a->condition, c.store))
            return std::nullopt;
        return next;
    }
    throw std::logic_error("havoc edge must be expanded by the caller");
}

namespace {

std::vector<ConcreteState> successors(const ConcreteState& c, const Edge& g, Value lo, Value hi) {
    std::vector<ConcreteState> out;
    if(const auto* h = std::get_if<Havoc>(&g.op)) {
        if(c.pc != g.source)
            return out;
        for(Value v = lo; v <= hi; ++v) {
            ConcreteState next = c;
            next.pc = g.target;
            next.store[h->var] = v;
            out.push_back(std::move(next));
        }
        return out;
    }
    if(auto next = step(c, g))
        out.push_back(std::move(*next));
    return out;
}

} // namespace

ReachResult enumerate_reachable(const Cfa& cfa, const EnumOptions& options) {
    struct Node {
        ConcreteState state;
        std::optional<std::size_t> parent;
        EdgeId via{};
        std::size_t depth = 0;
    };
    ReachResult result;
    std::vector<Node> nodes;
    std::deque<std::size_t> queue;
    auto admit = [&](ConcreteState c, std::optional<std::size_t> parent, EdgeId via,
                     std::size_t depth) {
        if(options.filter && !options.filter(c))
            return;
        if(!result.visited.insert(c).second)
            return;
        nodes.push_back(Node{std::move(c), parent, via, depth});
        queue.push_back(nodes.size() - 1);
        const Node& n = nodes.back();
        if(cfa.is_error(n.state.pc) && !result.error_hit) {
            result.error_hit = true;
            std::vector<TraceStep> rev;
            for(std::size_t i = nodes.size() - 1; nodes[i].parent; i = *nodes[i].parent)
                rev.push_back(TraceStep{nodes[i].via, nodes[i].state});
            result.witness.assign(rev.rbegin(), rev.rend());
        }
    };
    admit(initial_state(cfa), std::nullopt, EdgeId{0}, 0);
    while(!queue.empty()) {
        if(result.visited.size() > options.max_states) {
            result.status = EnumStatus::BudgetExceeded;
            break;
        }
        std::size_t i = options.depth_first ? queue.back() : queue.front();
        if(options.depth_first)
            queue.pop_back();
        else
            queue.pop_front();
        if(options.max_depth && nodes[i].depth >= *options.max_depth) {
            if(!cfa.outgoing(nodes[i].state.pc).empty())
                result.status = EnumStatus::DepthBounded;
            continue;
        }
        for(EdgeId id : cfa.outgoing(nodes[i].state.pc)) {
            ConcreteState from = nodes[i].state;
            std::size_t depth = nodes[i].depth + 1;
            for(auto& next : successors(from, cfa.edge(id), options.lo, options.hi))
                admit(std::move(next), i, id, depth);
        }
    }
    return result;
}

bool replays_to_error(const Cfa& cfa, const std::vector<TraceStep>& trace) {
    ConcreteState c = initial_state(cfa);
    for(const TraceStep& s : trace) {
        if(raw(s.edge) >= cfa.edges().size())
            return false;
        const Edge& g = cfa.edge(s.edge);
        if(g.source != c.pc)
            return false;
        if(const auto* h = std::get_if<Havoc>(&g.op)) {
            auto it = s.state.store.find(h->var);
            if(it == s.state.store.end())
                return false;
            c.pc = g.target;
            c.store[h->var] = it->second;
        } else {
            auto next = step(c, g);
            if(!next)
                return false;
            c = std::move(*next);
        }
        if(c != s.state)
            return false;
    }
    return cfa.is_error(c.pc);
}

namespace {

bool evaluate_atom(const Atom& a, const std::map<std::string, Value>& values) {
    __int128 sum = 0;
    for(auto& [m, c] : a.lhs) {
        __int128 prod = c;
        for(const auto& factor : monomial_factors(m))
            prod *= values.at(factor);
        sum += prod;
    }
    return a.rel == Rel::Le ? sum <= a.rhs : sum == a.rhs;
}

} // namespace

bool evaluate(const Formula& f, const std::map<std::string, Value>& values) {
    switch(f.kind()) {
    case FKind::True: return true;
    case FKind::False: return false;
    case FKind::Atom: return evaluate_atom(f.as_atom(), values);
    case FKind::Not: return !evaluate(f.operand(), values);
    case FKind::And:
        for(const auto& k : f.children())
            if(!evaluate(k, values))
                return false;
        return true;
    case FKind::Or:
        for(const auto& k : f.children())
            if(evaluate(k, values))
                return true;
        return false;
    }
    return false;
}

std::vector<std::map<std::string, Value>> box_models(const Formula& f,
                                                     const std::vector<std::string>& variables,
                                                     Value box) {
    std::vector<std::map<std::string, Value>> out;
    std::map<std::string, Value> point;
    for(const auto& v : variables)
        point[v] = -box;
    while(true) {
        if(evaluate(f, point))
            out.push_back(point);
        std::size_t k = 0;
        for(; k < variables.size(); ++k) {
            Value& x = point[variables[k]];
            if(x < box) {
                ++x;
                break;
            }
            x = -box;
        }
        if(k == variables.size())
            break;
    }
    return out;
}

Formula brute_force_boolean_abstraction(const Formula& sp, const std::vector<Atom>& pi, Value box) {
    std::set<std::string> vars = variables_of(sp);
    for(const auto& a : pi)
        for(const auto& v : a.variables())
            vars.insert(v);
    std::set<unsigned> masks;
    for(const auto& model : box_models(sp, {vars.begin(), vars.end()}, box)) {
        unsigned mask = 0;
        for(std::size_t i = 0; i < pi.size(); ++i)
            if(evaluate_atom(pi[i], model))
                mask |= 1u << i;
        masks.insert(mask);
    }
    std::vector<Formula> minterms;
    for(unsigned mask : masks) {
        std::vector<Formula> lits;
        for(std::size_t i = 0; i < pi.size(); ++i) {
            Formula p = Formula::atom(pi[i]);
            lits.push_back((mask >> i) & 1u ? p : !p);
        }
        minterms.push_back(conj(std::move(lits)));
    }
    return disj(std::move(minterms));
}

bool satisfies(const Formula& psi, const ConcreteState& c) {
    std::map<std::string, Value> values = c.store;
    values["pc"] = raw(c.pc);
    return evaluate(psi, values);
}

} // namespace cmc::oracle
