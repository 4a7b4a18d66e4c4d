#pragma once

#include <cmc/types.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cmc {

enum class ExprKind {
    Const,
    Var,
    Neg,
    Add,
    Sub,
    Mul,
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
    And,
    Or,
    Not,
    True,
    False,
};

struct ExprNode;

// Immutable expression tree shared between edges.
class Expr {
  public:
    Expr() = default;

    static Expr constant(Value v);
    static Expr var(std::string name);
    static Expr boolean(bool b);
    static Expr unary(ExprKind kind, Expr operand);
    static Expr binary(ExprKind kind, Expr lhs, Expr rhs);

    ExprKind kind() const;
    Value value() const;
    const std::string& name() const;
    const Expr& lhs() const;
    const Expr& rhs() const;
    const Expr& operand() const { return lhs(); }

    bool valid() const { return m_node != nullptr; }
    bool is_boolean() const;
    bool is_linear() const;

    std::string str() const;

    friend bool operator==(const Expr& a, const Expr& b);

  private:
    std::shared_ptr<const ExprNode> m_node;
};

struct ExprNode {
    ExprKind kind;
    Value value = 0;
    std::string name;
    Expr lhs;
    Expr rhs;
};

bool is_comparison(ExprKind kind);

// Logical negation that keeps comparisons flat: !(a < b) becomes a >= b.
Expr negate(const Expr& e);

void collect_variables(const Expr& e, std::set<std::string>& out);

class ArithmeticOverflow : public Error {
  public:
    using Error::Error;
};

using Lookup = std::function<std::optional<Value>(const std::string&)>;

// Partial evaluation. Unknown operands or host overflow give nullopt;
// `overflowed` is set when the result was lost to overflow.
std::optional<Value> eval_term(const Expr& e, const Lookup& lookup, bool* overflowed = nullptr);

// Three-valued evaluation with short-circuiting of known operands.
std::optional<bool> eval_condition(const Expr& e, const Lookup& lookup);

} // namespace cmc
