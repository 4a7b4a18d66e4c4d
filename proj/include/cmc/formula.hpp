#pragma once

#include <cmc/expr.hpp>
#include <cmc/types.hpp>

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cmc {

// Linear combination of monomials plus a constant. A monomial is a sorted,
// '*'-joined list of variable names; products of two or more variables are
// opaque to the solver.
struct Poly {
    std::map<std::string, Value> terms;
    Value constant = 0;

    static Poly var(const std::string& name);
    static Poly value(Value v);

    bool is_constant() const { return terms.empty(); }

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a);
    friend bool operator==(const Poly& a, const Poly& b) = default;
};

std::vector<std::string> monomial_factors(const std::string& monomial);

using Rename = std::function<std::string(const std::string&)>;

// Throws ArithmeticOverflow when coefficients leave the host range.
Poly to_poly(const Expr& term, const Rename& rename = {});

enum class Rel { Le, Eq };

// Canonical linear constraint `lhs rel rhs`: gcd-reduced, nonempty lhs whose
// first coefficient is positive.
struct Atom {
    std::map<std::string, Value> lhs;
    Rel rel = Rel::Le;
    Value rhs = 0;

    std::string str() const;
    std::set<std::string> variables() const;
    friend bool operator==(const Atom&, const Atom&) = default;
};

struct FormulaNode;

enum class FKind { True, False, Atom, Not, And, Or };

// Immutable, canonicalized boolean combination of atoms. Equality and order
// are by the canonical text, which is also the printed form.
class Formula {
  public:
    Formula();

    static Formula top();
    static Formula bottom();
    static Formula constant(bool b) { return b ? top() : bottom(); }
    static Formula atom(Atom a);

    // lhs op rhs for any comparison kind, normalized to Le/Eq atoms.
    static Formula compare(const Poly& lhs, ExprKind op, const Poly& rhs);

    FKind kind() const;
    const Atom& as_atom() const;
    const std::vector<Formula>& children() const;
    const Formula& operand() const { return children().front(); }

    bool is_true() const { return kind() == FKind::True; }
    bool is_false() const { return kind() == FKind::False; }
    // An atom or a negated atom.
    bool is_literal() const;

    const std::string& str() const;
    std::size_t atom_count() const;

    friend bool operator==(const Formula& a, const Formula& b);
    friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

  private:
    explicit Formula(std::shared_ptr<const FormulaNode> n) : m_node(std::move(n)) {}
    static Formula junction(std::vector<Formula> parts, FKind kind);
    friend Formula conj(std::vector<Formula>);
    friend Formula disj(std::vector<Formula>);
    friend Formula operator!(const Formula&);
    std::shared_ptr<const FormulaNode> m_node;
};

struct FormulaNode {
    FKind kind;
    Atom atom;
    std::vector<Formula> kids;
    std::string text;
    std::size_t atoms = 0;
};

Formula conj(std::vector<Formula> parts);
Formula disj(std::vector<Formula> parts);
Formula operator!(const Formula& f);
inline Formula operator&(const Formula& a, const Formula& b) { return conj({a, b}); }
inline Formula operator|(const Formula& a, const Formula& b) { return disj({a, b}); }
inline Formula implies(const Formula& a, const Formula& b) { return disj({!a, b}); }

Formula to_formula(const Expr& condition, const Rename& rename = {});

// Parses the text syntax; `a -> b` is sugar for `!a | b`.
Formula parse_formula(std::string_view text);

std::set<std::string> variables_of(const Formula& f);
void collect_atoms(const Formula& f, std::vector<Atom>& out);

Formula rename(const Formula& f, const Rename& rename);

inline std::size_t atom_count(const Formula& f) { return f.atom_count(); }

} // namespace cmc
