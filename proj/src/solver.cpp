#include <cmc/solver.hpp>

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>

namespace cmc {

const char* to_string(SatResult r) {
    switch(r) {
    case SatResult::Unsat: return "Unsat";
    case SatResult::Sat: return "Sat";
    case SatResult::MaybeSat: return "MaybeSat";
    }
    return "?";
}

namespace {

struct Overflow {};

Value add(Value a, Value b) {
    Value r;
    if(__builtin_add_overflow(a, b, &r))
        throw Overflow{};
    return r;
}

Value mul(Value a, Value b) {
    Value r;
    if(__builtin_mul_overflow(a, b, &r))
        throw Overflow{};
    return r;
}

Value floor_div(Value a, Value b) {
    Value q = a / b;
    if((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

Value ceil_div(Value a, Value b) { return -floor_div(-a, b); }

// A literal of the DNF: sum(lhs) rel rhs.
struct Lit {
    std::map<std::string, Value> lhs;
    Rel rel;
    Value rhs;
};

using Conjunct = std::vector<Lit>;
using Dnf = std::vector<Conjunct>;

Dnf dnf(const Formula& f, bool positive, std::size_t bound) {
    switch(f.kind()) {
    case FKind::True: return positive ? Dnf{Conjunct{}} : Dnf{};
    case FKind::False: return positive ? Dnf{} : Dnf{Conjunct{}};
    case FKind::Not: return dnf(f.operand(), !positive, bound);
    case FKind::Atom: {
        const Atom& a = f.as_atom();
        if(positive)
            return {{Lit{a.lhs, a.rel, a.rhs}}};
        std::map<std::string, Value> neg;
        for(auto& [m, c] : a.lhs)
            neg.emplace(m, -c);
        Lit above{neg, Rel::Le, -a.rhs - 1};
        if(a.rel == Rel::Le)
            return {{above}};
        return {{Lit{a.lhs, Rel::Le, a.rhs - 1}}, {above}};
    }
    case FKind::And:
    case FKind::Or: {
        bool product = (f.kind() == FKind::And) == positive;
        Dnf acc = product ? Dnf{Conjunct{}} : Dnf{};
        for(const auto& k : f.children()) {
            Dnf d = dnf(k, positive, bound);
            if(product) {
                Dnf next;
                if(acc.size() * d.size() > bound)
                    throw FormulaTooLarge("DNF exceeds " + std::to_string(bound) + " clauses");
                for(const auto& a : acc) {
                    for(const auto& b : d) {
                        Conjunct c = a;
                        c.insert(c.end(), b.begin(), b.end());
                        next.push_back(std::move(c));
                    }
                }
                acc = std::move(next);
                if(acc.empty())
                    return acc;
            } else {
                acc.insert(acc.end(), d.begin(), d.end());
                if(acc.size() > bound)
                    throw FormulaTooLarge("DNF exceeds " + std::to_string(bound) + " clauses");
            }
        }
        return acc;
    }
    }
    return {};
}

struct Row {
    std::vector<Value> a;
    Value b = 0;
};

bool is_zero(const Row& r) {
    return std::all_of(r.a.begin(), r.a.end(), [](Value v) { return v == 0; });
}

// Divides an inequality row by the gcd of its coefficients, rounding the bound down.
void tighten(Row& r) {
    Value g = 0;
    for(Value v : r.a)
        g = std::gcd(g, v < 0 ? -v : v);
    if(g > 1) {
        for(Value& v : r.a)
            v /= g;
        r.b = floor_div(r.b, g);
    }
}

class ConjunctSolver {
  public:
    ConjunctSolver(const Conjunct& lits, const SolverOptions& options)
        : m_lits(lits), m_options(options) {}

    SatOutcome run() {
        try {
            return solve();
        } catch(const Overflow&) {
            return {SatResult::MaybeSat, {}};
        }
    }

  private:
    static constexpr std::size_t row_limit = 20000;
    static constexpr std::size_t node_budget = 200000;

    struct Substitution {
        std::size_t var;
        Row eq; // eq.a[var] is +-1
    };

    SatOutcome solve() {
        for(const auto& l : m_lits)
            for(auto& [m, c] : l.lhs)
                if(!m_index.count(m)) {
                    m_index.emplace(m, m_names.size());
                    m_names.push_back(m);
                }
        std::size_t n = m_names.size();
        std::vector<Row> eqs;
        std::vector<Row> les;
        for(const auto& l : m_lits) {
            Row r{std::vector<Value>(n, 0), l.rhs};
            for(auto& [m, c] : l.lhs)
                r.a[m_index.at(m)] = c;
            (l.rel == Rel::Eq ? eqs : les).push_back(std::move(r));
        }

        std::vector<bool> eliminated(n, false);
        while(!eqs.empty()) {
            Row e = std::move(eqs.back());
            eqs.pop_back();
            Value g = 0;
            for(Value v : e.a)
                g = std::gcd(g, v < 0 ? -v : v);
            if(g == 0) {
                if(e.b != 0)
                    return {SatResult::Unsat, {}};
                continue;
            }
            if(e.b % g != 0)
                return {SatResult::Unsat, {}};
            for(Value& v : e.a)
                v /= g;
            e.b /= g;
            std::optional<std::size_t> pivot;
            for(std::size_t j = 0; j < n; ++j)
                if(e.a[j] == 1 || e.a[j] == -1) {
                    pivot = j;
                    break;
                }
            if(!pivot) {
                Row neg{e.a, -e.b};
                for(Value& v : neg.a)
                    v = -v;
                les.push_back(e);
                les.push_back(std::move(neg));
                continue;
            }
            std::size_t j = *pivot;
            auto substitute = [&](Row& r) {
                if(r.a[j] == 0)
                    return;
                Value f = mul(r.a[j], e.a[j]);
                for(std::size_t i = 0; i < n; ++i)
                    r.a[i] = add(r.a[i], -mul(f, e.a[i]));
                r.b = add(r.b, -mul(f, e.b));
            };
            for(Row& r : eqs)
                substitute(r);
            for(Row& r : les)
                substitute(r);
            eliminated[j] = true;
            m_subs.push_back(Substitution{j, std::move(e)});
        }

        std::vector<Row> rows;
        if(!add_rows(rows, std::move(les)))
            return {SatResult::Unsat, {}};

        std::vector<std::size_t> remaining;
        for(std::size_t j = 0; j < n; ++j)
            if(!eliminated[j])
                remaining.push_back(j);
        bool aborted = false;
        while(!remaining.empty()) {
            // cheapest variable to eliminate
            std::size_t best = 0;
            std::size_t best_cost = std::numeric_limits<std::size_t>::max();
            for(std::size_t k = 0; k < remaining.size(); ++k) {
                std::size_t pos = 0;
                std::size_t neg = 0;
                for(const Row& r : rows) {
                    pos += r.a[remaining[k]] > 0;
                    neg += r.a[remaining[k]] < 0;
                }
                std::size_t cost = pos * neg;
                if(cost < best_cost) {
                    best_cost = cost;
                    best = k;
                }
            }
            std::size_t j = remaining[best];
            remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
            std::vector<Row> with;
            std::vector<Row> without;
            for(Row& r : rows)
                (r.a[j] != 0 ? with : without).push_back(std::move(r));
            std::vector<Row> combined;
            for(const Row& p : with) {
                if(p.a[j] <= 0)
                    continue;
                for(const Row& q : with) {
                    if(q.a[j] >= 0)
                        continue;
                    Value cp = -q.a[j];
                    Value cq = p.a[j];
                    Row r{std::vector<Value>(n, 0), add(mul(p.b, cp), mul(q.b, cq))};
                    for(std::size_t i = 0; i < n; ++i)
                        r.a[i] = add(mul(p.a[i], cp), mul(q.a[i], cq));
                    r.a[j] = 0;
                    combined.push_back(std::move(r));
                }
            }
            m_stages.push_back({j, std::move(with)});
            rows = std::move(without);
            if(!add_rows(rows, std::move(combined)))
                return {SatResult::Unsat, {}};
            if(rows.size() > row_limit) {
                aborted = true;
                break;
            }
        }
        if(aborted)
            return {SatResult::MaybeSat, {}};
        return search();
    }

    // Appends normalized rows, dropping trivial and dominated ones. False on a
    // trivially infeasible row.
    bool add_rows(std::vector<Row>& rows, std::vector<Row> fresh) {
        std::map<std::vector<Value>, std::size_t> index;
        for(std::size_t i = 0; i < rows.size(); ++i)
            index.emplace(rows[i].a, i);
        for(Row& r : fresh) {
            tighten(r);
            if(is_zero(r)) {
                if(r.b < 0)
                    return false;
                continue;
            }
            auto [it, inserted] = index.emplace(r.a, rows.size());
            if(inserted)
                rows.push_back(std::move(r));
            else
                rows[it->second].b = std::min(rows[it->second].b, r.b);
        }
        return true;
    }

    SatOutcome search() {
        std::size_t n = m_names.size();
        m_value.assign(n, 0);
        m_constrained.assign(n, false);
        for(const auto& [j, rows] : m_stages)
            for(const Row& r : rows)
                for(std::size_t i = 0; i < n; ++i)
                    if(r.a[i] != 0)
                        m_constrained[i] = true;
        m_complete = true;
        m_nodes = 0;
        bool found = assign(m_stages.size());
        if(!found)
            return {m_complete ? SatResult::Unsat : SatResult::MaybeSat, {}};
        for(auto it = m_subs.rbegin(); it != m_subs.rend(); ++it) {
            const Row& e = it->eq;
            Value rest = e.b;
            for(std::size_t i = 0; i < n; ++i)
                if(i != it->var)
                    rest = add(rest, -mul(e.a[i], m_value[i]));
            m_value[it->var] = mul(rest, e.a[it->var]);
        }
        Model model;
        for(std::size_t i = 0; i < n; ++i)
            model.emplace(m_names[i], m_value[i]);
        for(const Lit& l : m_lits) {
            __int128 sum = 0;
            for(auto& [m, c] : l.lhs)
                sum += static_cast<__int128>(c) * model.at(m);
            bool ok = l.rel == Rel::Le ? sum <= l.rhs : sum == l.rhs;
            if(!ok)
                return {SatResult::MaybeSat, {}};
        }
        return {SatResult::Sat, std::move(model)};
    }

    // Assigns stages [0, level) in reverse elimination order.
    bool assign(std::size_t level) {
        if(level == 0)
            return true;
        if(++m_nodes > node_budget) {
            m_complete = false;
            return false;
        }
        const auto& [j, rows] = m_stages[level - 1];
        std::optional<Value> lo;
        std::optional<Value> hi;
        for(const Row& r : rows) {
            Value rest = r.b;
            for(std::size_t i = 0; i < r.a.size(); ++i)
                if(i != j && r.a[i] != 0)
                    rest = add(rest, -mul(r.a[i], m_value[i]));
            if(r.a[j] > 0) {
                Value u = floor_div(rest, r.a[j]);
                hi = hi ? std::min(*hi, u) : u;
            } else {
                Value l = ceil_div(rest, r.a[j]);
                lo = lo ? std::max(*lo, l) : l;
            }
        }
        if(lo && hi && *lo > *hi)
            return false;
        std::size_t limit = static_cast<std::size_t>(2 * m_options.witness_box + 1);
        if(m_constrained[j] &&
           (!lo || !hi || static_cast<__int128>(*hi) - *lo + 1 > static_cast<__int128>(limit)))
            m_complete = false;
        for(Value v : candidates(lo, hi, limit)) {
            m_value[j] = v;
            if(assign(level - 1))
                return true;
            if(m_nodes > node_budget)
                return false;
        }
        return false;
    }

    // Values in [lo, hi] ordered by distance from zero.
    static std::vector<Value> candidates(std::optional<Value> lo, std::optional<Value> hi,
                                         std::size_t limit) {
        Value start = 0;
        if(lo && *lo > 0)
            start = *lo;
        if(hi && *hi < 0)
            start = *hi;
        std::vector<Value> out{start};
        for(Value d = 1; out.size() < limit; ++d) {
            bool any = false;
            Value up = start + d;
            Value down = start - d;
            if(!hi || up <= *hi) {
                out.push_back(up);
                any = true;
            }
            if(out.size() < limit && (!lo || down >= *lo)) {
                out.push_back(down);
                any = true;
            }
            if(!any)
                break;
        }
        return out;
    }

    const Conjunct& m_lits;
    const SolverOptions& m_options;
    std::map<std::string, std::size_t> m_index;
    std::vector<std::string> m_names;
    std::vector<Substitution> m_subs;
    std::vector<std::pair<std::size_t, std::vector<Row>>> m_stages;
    std::vector<Value> m_value;
    std::vector<bool> m_constrained;
    bool m_complete = true;
    std::size_t m_nodes = 0;
};

} // namespace

SatOutcome check_sat(const Formula& f, const SolverOptions& options) {
    Dnf d = dnf(f, true, options.clause_bound);
    bool maybe = false;
    for(const Conjunct& c : d) {
        SatOutcome r = ConjunctSolver(c, options).run();
        if(r.result == SatResult::Sat) {
            for(const auto& v : variables_of(f))
                r.model.emplace(v, 0);
            std::vector<Atom> atoms;
            collect_atoms(f, atoms);
            for(const auto& a : atoms)
                for(auto& [m, c] : a.lhs)
                    r.model.emplace(m, 0);
            return r;
        }
        if(r.result == SatResult::MaybeSat)
            maybe = true;
    }
    return {maybe ? SatResult::MaybeSat : SatResult::Unsat, {}};
}

SatResult is_satisfiable(const Formula& f, const SolverOptions& options) {
    return check_sat(f, options).result;
}

Entailment entails(const Formula& f, const Formula& g, const SolverOptions& options) {
    try {
        return is_satisfiable(f & !g, options) == SatResult::Unsat ? Entailment::Yes
                                                                  : Entailment::Unknown;
    } catch(const FormulaTooLarge&) {
        return Entailment::Unknown;
    }
}

SatResult Solver::is_satisfiable(const Formula& f) {
    ++m_queries;
    auto it = m_cache.find(f.str());
    if(it == m_cache.end()) {
        std::optional<SatResult> r;
        try {
            r = cmc::is_satisfiable(f, m_options);
        } catch(const FormulaTooLarge&) {
        }
        it = m_cache.emplace(f.str(), r).first;
    }
    if(!it->second)
        throw FormulaTooLarge("DNF exceeds " + std::to_string(m_options.clause_bound) + " clauses");
    return *it->second;
}

Entailment Solver::entails(const Formula& f, const Formula& g) {
    if(f.is_false() || g.is_true() || f == g)
        return Entailment::Yes;
    try {
        return is_satisfiable(f & !g) == SatResult::Unsat ? Entailment::Yes : Entailment::Unknown;
    } catch(const FormulaTooLarge&) {
        return Entailment::Unknown;
    }
}

} // namespace cmc
