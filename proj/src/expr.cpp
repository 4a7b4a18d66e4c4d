#include <cmc/expr.hpp>

#include <cassert>

namespace cmc {

namespace {

int precedence(ExprKind k) {
    switch(k) {
    case ExprKind::Or: return 1;
    case ExprKind::And: return 2;
    case ExprKind::Not: return 3;
    case ExprKind::Lt:
    case ExprKind::Le:
    case ExprKind::Eq:
    case ExprKind::Ne:
    case ExprKind::Ge:
    case ExprKind::Gt: return 4;
    case ExprKind::Add:
    case ExprKind::Sub: return 5;
    case ExprKind::Mul: return 6;
    case ExprKind::Neg: return 7;
    default: return 8;
    }
}

const char* op_text(ExprKind k) {
    switch(k) {
    case ExprKind::Add: return " + ";
    case ExprKind::Sub: return " - ";
    case ExprKind::Mul: return " * ";
    case ExprKind::Lt: return " < ";
    case ExprKind::Le: return " <= ";
    case ExprKind::Eq: return " == ";
    case ExprKind::Ne: return " != ";
    case ExprKind::Ge: return " >= ";
    case ExprKind::Gt: return " > ";
    case ExprKind::And: return " && ";
    case ExprKind::Or: return " || ";
    default: return "?";
    }
}

void print(const Expr& e, std::string& out) {
    auto child = [&](const Expr& c, bool paren) {
        if(paren)
            out += '(';
        print(c, out);
        if(paren)
            out += ')';
    };
    int p = precedence(e.kind());
    switch(e.kind()) {
    case ExprKind::Const: out += std::to_string(e.value()); return;
    case ExprKind::Var: out += e.name(); return;
    case ExprKind::True: out += "true"; return;
    case ExprKind::False: out += "false"; return;
    case ExprKind::Neg:
        out += '-';
        child(e.operand(), precedence(e.operand().kind()) < p || e.operand().kind() == ExprKind::Neg ||
                               (e.operand().kind() == ExprKind::Const && e.operand().value() < 0));
        return;
    case ExprKind::Not:
        out += '!';
        child(e.operand(), precedence(e.operand().kind()) < 8);
        return;
    default:
        child(e.lhs(), precedence(e.lhs().kind()) < p ||
                           (is_comparison(e.kind()) && is_comparison(e.lhs().kind())));
        out += op_text(e.kind());
        child(e.rhs(), precedence(e.rhs().kind()) <= p);
        return;
    }
}

bool add_overflow(Value a, Value b, Value& r) { return __builtin_add_overflow(a, b, &r); }
bool sub_overflow(Value a, Value b, Value& r) { return __builtin_sub_overflow(a, b, &r); }
bool mul_overflow(Value a, Value b, Value& r) { return __builtin_mul_overflow(a, b, &r); }

} // namespace

Expr Expr::constant(Value v) {
    Expr e;
    e.m_node = std::make_shared<const ExprNode>(ExprNode{ExprKind::Const, v, {}, {}, {}});
    return e;
}

Expr Expr::var(std::string name) {
    Expr e;
    e.m_node = std::make_shared<const ExprNode>(ExprNode{ExprKind::Var, 0, std::move(name), {}, {}});
    return e;
}

Expr Expr::boolean(bool b) {
    Expr e;
    e.m_node = std::make_shared<const ExprNode>(
        ExprNode{b ? ExprKind::True : ExprKind::False, 0, {}, {}, {}});
    return e;
}

Expr Expr::unary(ExprKind kind, Expr operand) {
    assert(kind == ExprKind::Neg || kind == ExprKind::Not);
    Expr e;
    e.m_node = std::make_shared<const ExprNode>(ExprNode{kind, 0, {}, std::move(operand), {}});
    return e;
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs) {
    Expr e;
    e.m_node =
        std::make_shared<const ExprNode>(ExprNode{kind, 0, {}, std::move(lhs), std::move(rhs)});
    return e;
}

ExprKind Expr::kind() const { return m_node->kind; }
Value Expr::value() const { return m_node->value; }
const std::string& Expr::name() const { return m_node->name; }
const Expr& Expr::lhs() const { return m_node->lhs; }
const Expr& Expr::rhs() const { return m_node->rhs; }

bool Expr::is_boolean() const {
    switch(kind()) {
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Not:
    case ExprKind::True:
    case ExprKind::False: return true;
    default: return is_comparison(kind());
    }
}

bool Expr::is_linear() const {
    switch(kind()) {
    case ExprKind::Const:
    case ExprKind::Var:
    case ExprKind::True:
    case ExprKind::False: return true;
    case ExprKind::Neg:
    case ExprKind::Not: return operand().is_linear();
    case ExprKind::Mul:
        if(lhs().kind() != ExprKind::Const && rhs().kind() != ExprKind::Const)
            return false;
        [[fallthrough]];
    default: return lhs().is_linear() && rhs().is_linear();
    }
}

std::string Expr::str() const {
    std::string out;
    print(*this, out);
    return out;
}

bool operator==(const Expr& a, const Expr& b) {
    if(a.m_node == b.m_node)
        return true;
    if(!a.m_node || !b.m_node)
        return false;
    const ExprNode& x = *a.m_node;
    const ExprNode& y = *b.m_node;
    return x.kind == y.kind && x.value == y.value && x.name == y.name && x.lhs == y.lhs &&
           x.rhs == y.rhs;
}

bool is_comparison(ExprKind kind) {
    switch(kind) {
    case ExprKind::Lt:
    case ExprKind::Le:
    case ExprKind::Eq:
    case ExprKind::Ne:
    case ExprKind::Ge:
    case ExprKind::Gt: return true;
    default: return false;
    }
}

Expr negate(const Expr& e) {
    switch(e.kind()) {
    case ExprKind::Lt: return Expr::binary(ExprKind::Ge, e.lhs(), e.rhs());
    case ExprKind::Le: return Expr::binary(ExprKind::Gt, e.lhs(), e.rhs());
    case ExprKind::Eq: return Expr::binary(ExprKind::Ne, e.lhs(), e.rhs());
    case ExprKind::Ne: return Expr::binary(ExprKind::Eq, e.lhs(), e.rhs());
    case ExprKind::Ge: return Expr::binary(ExprKind::Lt, e.lhs(), e.rhs());
    case ExprKind::Gt: return Expr::binary(ExprKind::Le, e.lhs(), e.rhs());
    case ExprKind::True: return Expr::boolean(false);
    case ExprKind::False: return Expr::boolean(true);
    case ExprKind::Not: return e.operand();
    default: return Expr::unary(ExprKind::Not, e);
    }
}

void collect_variables(const Expr& e, std::set<std::string>& out) {
    if(!e.valid())
        return;
    if(e.kind() == ExprKind::Var) {
        out.insert(e.name());
        return;
    }
    collect_variables(e.lhs(), out);
    collect_variables(e.rhs(), out);
}

std::optional<Value> eval_term(const Expr& e, const Lookup& lookup, bool* overflowed) {
    switch(e.kind()) {
    case ExprKind::Const: return e.value();
    case ExprKind::Var: return lookup(e.name());
    case ExprKind::Neg: {
        auto v = eval_term(e.operand(), lookup, overflowed);
        Value r;
        if(!v)
            return std::nullopt;
        if(sub_overflow(0, *v, r)) {
            if(overflowed)
                *overflowed = true;
            return std::nullopt;
        }
        return r;
    }
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul: {
        auto a = eval_term(e.lhs(), lookup, overflowed);
        auto b = eval_term(e.rhs(), lookup, overflowed);
        if(!a || !b)
            return std::nullopt;
        Value r;
        bool over = e.kind() == ExprKind::Add   ? add_overflow(*a, *b, r)
                    : e.kind() == ExprKind::Sub ? sub_overflow(*a, *b, r)
                                                : mul_overflow(*a, *b, r);
        if(over) {
            if(overflowed)
                *overflowed = true;
            return std::nullopt;
        }
        return r;
    }
    default: throw Error("boolean expression used as a term: " + e.str());
    }
}

std::optional<bool> eval_condition(const Expr& e, const Lookup& lookup) {
    switch(e.kind()) {
    case ExprKind::True: return true;
    case ExprKind::False: return false;
    case ExprKind::Not: {
        auto v = eval_condition(e.operand(), lookup);
        if(!v)
            return std::nullopt;
        return !*v;
    }
    case ExprKind::And: {
        auto a = eval_condition(e.lhs(), lookup);
        if(a && !*a)
            return false;
        auto b = eval_condition(e.rhs(), lookup);
        if(b && !*b)
            return false;
        if(a && b)
            return true;
        return std::nullopt;
    }
    case ExprKind::Or: {
        auto a = eval_condition(e.lhs(), lookup);
        if(a && *a)
            return true;
        auto b = eval_condition(e.rhs(), lookup);
        if(b && *b)
            return true;
        if(a && b)
            return false;
        return std::nullopt;
    }
    default: break;
    }
    if(!is_comparison(e.kind()))
        throw Error("term used as a condition: " + e.str());
    auto a = eval_term(e.lhs(), lookup);
    auto b = eval_term(e.rhs(), lookup);
    if(!a || !b)
        return std::nullopt;
    switch(e.kind()) {
    case ExprKind::Lt: return *a < *b;
    case ExprKind::Le: return *a <= *b;
    case ExprKind::Eq: return *a == *b;
    case ExprKind::Ne: return *a != *b;
    case ExprKind::Ge: return *a >= *b;
    default: return *a > *b;
    }
}

} // namespace cmc
