#include <cmc/formula.hpp>
#include <cmc/frontend.hpp>
#include <cmc/lexer.hpp>

#include <algorithm>
#include <cassert>
#include <numeric>

namespace cmc {

namespace {

Value checked_add(Value a, Value b) {
    Value r;
    if(__builtin_add_overflow(a, b, &r))
        throw ArithmeticOverflow("coefficient overflow");
    return r;
}

Value checked_mul(Value a, Value b) {
    Value r;
    if(__builtin_mul_overflow(a, b, &r))
        throw ArithmeticOverflow("coefficient overflow");
    return r;
}

Value checked_neg(Value a) {
    Value r;
    if(__builtin_sub_overflow(Value{0}, a, &r))
        throw ArithmeticOverflow("coefficient overflow");
    return r;
}

Value floor_div(Value a, Value b) {
    Value q = a / b;
    if((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

std::string join_monomial(std::vector<std::string> factors) {
    std::sort(factors.begin(), factors.end());
    std::string out;
    for(const auto& f : factors) {
        if(!out.empty())
            out += '*';
        out += f;
    }
    return out;
}

std::string term_text(Value coeff, const std::string& mono) {
    if(coeff == 1)
        return mono;
    return std::to_string(coeff) + "*" + mono;
}

std::shared_ptr<const FormulaNode> make_node(FKind kind, Atom atom, std::vector<Formula> kids) {
    auto n = std::make_shared<FormulaNode>();
    n->kind = kind;
    n->atom = std::move(atom);
    n->kids = std::move(kids);
    switch(kind) {
    case FKind::True: n->text = "true"; break;
    case FKind::False: n->text = "false"; break;
    case FKind::Atom:
        n->text = n->atom.str();
        n->atoms = 1;
        break;
    case FKind::Not: {
        const Formula& x = n->kids.front();
        n->atoms = x.atom_count();
        if(x.kind() == FKind::Atom) {
            // print the complementary relation instead of !(...)
            Atom a = x.as_atom();
            if(a.rel == Rel::Eq) {
                std::string t = a.str();
                n->text = t.replace(t.find(" = "), 3, " != ");
            } else {
                a.rhs = checked_add(a.rhs, 1);
                std::string t = a.str();
                n->text = t.replace(t.find(" <= "), 4, " >= ");
            }
        } else {
            n->text = "!(" + x.str() + ")";
        }
        break;
    }
    case FKind::And:
    case FKind::Or: {
        const char* sep = kind == FKind::And ? " & " : " | ";
        FKind other = kind == FKind::And ? FKind::Or : FKind::And;
        for(std::size_t i = 0; i < n->kids.size(); ++i) {
            const Formula& k = n->kids[i];
            if(i)
                n->text += sep;
            if(k.kind() == other)
                n->text += "(" + k.str() + ")";
            else
                n->text += k.str();
            n->atoms += k.atom_count();
        }
        break;
    }
    }
    return n;
}

Formula make_constraint(std::map<std::string, Value> terms, Rel rel, Value k) {
    // terms rel k
    for(auto it = terms.begin(); it != terms.end();) {
        if(it->second == 0)
            it = terms.erase(it);
        else
            ++it;
    }
    if(terms.empty())
        return Formula::constant(rel == Rel::Le ? 0 <= k : k == 0);
    Value g = 0;
    for(auto& [m, c] : terms)
        g = std::gcd(g, c < 0 ? checked_neg(c) : c);
    bool negative = terms.begin()->second < 0;
    if(rel == Rel::Eq) {
        if(k % g != 0)
            return Formula::bottom();
        Atom a;
        for(auto& [m, c] : terms)
            a.lhs.emplace(m, negative ? -(c / g) : c / g);
        a.rel = Rel::Eq;
        a.rhs = negative ? -(k / g) : k / g;
        return Formula::atom(std::move(a));
    }
    Value bound = floor_div(k, g);
    if(!negative) {
        Atom a;
        for(auto& [m, c] : terms)
            a.lhs.emplace(m, c / g);
        a.rhs = bound;
        return Formula::atom(std::move(a));
    }
    // t <= b with t leading negative: !(-t <= -b - 1)
    Atom a;
    for(auto& [m, c] : terms)
        a.lhs.emplace(m, -(c / g));
    a.rhs = checked_add(checked_neg(bound), -1);
    return !Formula::atom(std::move(a));
}

} // namespace

Poly Poly::var(const std::string& name) {
    Poly p;
    p.terms.emplace(name, 1);
    return p;
}

Poly Poly::value(Value v) {
    Poly p;
    p.constant = v;
    return p;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r = a;
    for(auto& [m, c] : b.terms) {
        Value v = checked_add(r.terms[m], c);
        if(v == 0)
            r.terms.erase(m);
        else
            r.terms[m] = v;
    }
    r.constant = checked_add(r.constant, b.constant);
    return r;
}

Poly operator-(const Poly& a) {
    Poly r;
    for(auto& [m, c] : a.terms)
        r.terms.emplace(m, checked_neg(c));
    r.constant = checked_neg(a.constant);
    return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
    Poly r = Poly::value(checked_mul(a.constant, b.constant));
    auto add = [&](const std::string& m, Value c) {
        Poly t;
        t.terms.emplace(m, c);
        if(c != 0)
            r = r + t;
    };
    for(auto& [m, c] : a.terms)
        add(m, checked_mul(c, b.constant));
    for(auto& [m, c] : b.terms)
        add(m, checked_mul(c, a.constant));
    for(auto& [ma, ca] : a.terms) {
        for(auto& [mb, cb] : b.terms) {
            auto fa = monomial_factors(ma);
            auto fb = monomial_factors(mb);
            fa.insert(fa.end(), fb.begin(), fb.end());
            add(join_monomial(std::move(fa)), checked_mul(ca, cb));
        }
    }
    return r;
}

std::vector<std::string> monomial_factors(const std::string& monomial) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while(true) {
        std::size_t star = monomial.find('*', start);
        out.push_back(monomial.substr(start, star - start));
        if(star == std::string::npos)
            break;
        start = star + 1;
    }
    return out;
}

Poly to_poly(const Expr& e, const Rename& rename) {
    switch(e.kind()) {
    case ExprKind::Const: return Poly::value(e.value());
    case ExprKind::Var: return Poly::var(rename ? rename(e.name()) : e.name());
    case ExprKind::Neg: return -to_poly(e.operand(), rename);
    case ExprKind::Add: return to_poly(e.lhs(), rename) + to_poly(e.rhs(), rename);
    case ExprKind::Sub: return to_poly(e.lhs(), rename) - to_poly(e.rhs(), rename);
    case ExprKind::Mul: return to_poly(e.lhs(), rename) * to_poly(e.rhs(), rename);
    default: throw Error("condition used as a term: " + e.str());
    }
}

std::string Atom::str() const {
    std::string pos;
    std::string neg;
    for(auto& [m, c] : lhs) {
        std::string& side = c > 0 ? pos : neg;
        if(!side.empty())
            side += " + ";
        side += term_text(c > 0 ? c : -c, m);
    }
    std::string right;
    if(neg.empty()) {
        right = std::to_string(rhs);
    } else {
        right = neg;
        if(rhs > 0)
            right += " + " + std::to_string(rhs);
        else if(rhs < 0)
            right += " - " + std::to_string(-rhs);
    }
    return pos + (rel == Rel::Le ? " <= " : " = ") + right;
}

std::set<std::string> Atom::variables() const {
    std::set<std::string> out;
    for(auto& [m, c] : lhs)
        for(auto& f : monomial_factors(m))
            out.insert(f);
    return out;
}

Formula::Formula() : m_node(top().m_node) {}

Formula Formula::top() {
    static const Formula t(make_node(FKind::True, {}, {}));
    return t;
}

Formula Formula::bottom() {
    static const Formula f(make_node(FKind::False, {}, {}));
    return f;
}

Formula Formula::atom(Atom a) {
    assert(!a.lhs.empty() && a.lhs.begin()->second > 0);
    return Formula(make_node(FKind::Atom, std::move(a), {}));
}

Formula Formula::compare(const Poly& lhs, ExprKind op, const Poly& rhs) {
    Poly d = lhs - rhs;
    // d.terms + d.constant op 0
    Value k = checked_neg(d.constant);
    auto negated_terms = [&]() {
        std::map<std::string, Value> t;
        for(auto& [m, c] : d.terms)
            t.emplace(m, checked_neg(c));
        return t;
    };
    switch(op) {
    case ExprKind::Le: return make_constraint(d.terms, Rel::Le, k);
    case ExprKind::Lt: return make_constraint(d.terms, Rel::Le, checked_add(k, -1));
    case ExprKind::Ge: return make_constraint(negated_terms(), Rel::Le, checked_neg(k));
    case ExprKind::Gt: return make_constraint(negated_terms(), Rel::Le, checked_add(checked_neg(k), -1));
    case ExprKind::Eq: return make_constraint(d.terms, Rel::Eq, k);
    case ExprKind::Ne: return !make_constraint(d.terms, Rel::Eq, k);
    default: throw Error("not a comparison");
    }
}

FKind Formula::kind() const { return m_node->kind; }
const Atom& Formula::as_atom() const { return m_node->atom; }
const std::vector<Formula>& Formula::children() const { return m_node->kids; }
const std::string& Formula::str() const { return m_node->text; }
std::size_t Formula::atom_count() const { return m_node->atoms; }

bool Formula::is_literal() const {
    return kind() == FKind::Atom || (kind() == FKind::Not && operand().kind() == FKind::Atom);
}

bool operator==(const Formula& a, const Formula& b) {
    return a.m_node == b.m_node || a.m_node->text == b.m_node->text;
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
    if(a.m_node == b.m_node)
        return std::strong_ordering::equal;
    int c = a.m_node->text.compare(b.m_node->text);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

Formula Formula::junction(std::vector<Formula> parts, FKind kind) {
    FKind unit = kind == FKind::And ? FKind::True : FKind::False;
    FKind zero = kind == FKind::And ? FKind::False : FKind::True;
    std::vector<Formula> flat;
    flat.reserve(parts.size());
    for(auto& p : parts) {
        if(p.kind() == unit)
            continue;
        if(p.kind() == zero)
            return constant(zero == FKind::True);
        if(p.kind() == kind)
            flat.insert(flat.end(), p.children().begin(), p.children().end());
        else
            flat.push_back(std::move(p));
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    for(const auto& f : flat) {
        if(f.kind() == FKind::Not && std::binary_search(flat.begin(), flat.end(), f.operand()))
            return constant(zero == FKind::True);
    }
    if(flat.empty())
        return constant(unit == FKind::True);
    if(flat.size() == 1)
        return flat.front();
    return Formula(make_node(kind, {}, std::move(flat)));
}

Formula conj(std::vector<Formula> parts) { return Formula::junction(std::move(parts), FKind::And); }

Formula disj(std::vector<Formula> parts) { return Formula::junction(std::move(parts), FKind::Or); }

Formula operator!(const Formula& f) {
    switch(f.kind()) {
    case FKind::True: return Formula::bottom();
    case FKind::False: return Formula::top();
    case FKind::Not: return f.operand();
    default: return Formula(make_node(FKind::Not, {}, {f}));
    }
}

Formula to_formula(const Expr& e, const Rename& rename) {
    switch(e.kind()) {
    case ExprKind::True: return Formula::top();
    case ExprKind::False: return Formula::bottom();
    case ExprKind::Not: return !to_formula(e.operand(), rename);
    case ExprKind::And: return to_formula(e.lhs(), rename) & to_formula(e.rhs(), rename);
    case ExprKind::Or: return to_formula(e.lhs(), rename) | to_formula(e.rhs(), rename);
    default: break;
    }
    if(!is_comparison(e.kind()))
        throw Error("term used as a condition: " + e.str());
    return Formula::compare(to_poly(e.lhs(), rename), e.kind(), to_poly(e.rhs(), rename));
}

namespace {

Formula parse_implication(TokenStream& ts) {
    Expr lhs = parse_expr(ts);
    if(!lhs.is_boolean())
        ts.fail("expected a formula, found term " + lhs.str());
    Formula f = to_formula(lhs);
    if(ts.accept("->"))
        return implies(f, parse_implication(ts));
    return f;
}

} // namespace

Formula parse_formula(std::string_view text) {
    TokenStream ts(tokenize(text));
    Formula f = parse_implication(ts);
    if(!ts.at_end())
        ts.fail("unexpected '" + ts.peek().text + "' after formula");
    return f;
}

void collect_atoms(const Formula& f, std::vector<Atom>& out) {
    if(f.kind() == FKind::Atom) {
        out.push_back(f.as_atom());
        return;
    }
    for(const auto& k : f.children())
        collect_atoms(k, out);
}

std::set<std::string> variables_of(const Formula& f) {
    std::vector<Atom> atoms;
    collect_atoms(f, atoms);
    std::set<std::string> out;
    for(const auto& a : atoms)
        for(auto& v : a.variables())
            out.insert(v);
    return out;
}

Formula rename(const Formula& f, const Rename& rn) {
    switch(f.kind()) {
    case FKind::True:
    case FKind::False: return f;
    case FKind::Atom: {
        std::map<std::string, Value> terms;
        for(auto& [m, c] : f.as_atom().lhs) {
            auto factors = monomial_factors(m);
            for(auto& x : factors)
                x = rn(x);
            terms[join_monomial(std::move(factors))] += c;
        }
        return make_constraint(std::move(terms), f.as_atom().rel, f.as_atom().rhs);
    }
    case FKind::Not: return !rename(f.operand(), rn);
    case FKind::And:
    case FKind::Or: {
        std::vector<Formula> kids;
        for(const auto& k : f.children())
            kids.push_back(rename(k, rn));
        return f.kind() == FKind::And ? conj(std::move(kids)) : disj(std::move(kids));
    }
    }
    return f;
}

} // namespace cmc
