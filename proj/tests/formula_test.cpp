#include <cmc/formula.hpp>
#include <cmc/frontend.hpp>
#include <cmc/oracle.hpp>
#include <cmc/path_formula.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace cmc;

namespace {

Formula f(const char* text) { return parse_formula(text); }

// Independent count of atom occurrences.
std::size_t count_atoms(const Formula& g) {
    if(g.kind() == FKind::Atom)
        return 1;
    std::size_t n = 0;
    for(const auto& k : g.children())
        n += count_atoms(k);
    return n;
}

Formula random_formula(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> coeff(-4, 4);
    std::uniform_int_distribution<int> pick(0, 9);
    int k = pick(rng);
    if(depth == 0 || k < 5) {
        static const char* const vars[] = {"x", "y", "z"};
        Poly p;
        for(const char* v : vars)
            p = p + Poly::value(coeff(rng)) * Poly::var(v);
        static const ExprKind rel[] = {ExprKind::Lt, ExprKind::Le, ExprKind::Eq,
                                       ExprKind::Ne, ExprKind::Ge, ExprKind::Gt};
        return Formula::compare(p, rel[static_cast<std::size_t>(pick(rng)) % 6],
                                Poly::value(coeff(rng) * 2));
    }
    if(k == 5)
        return !random_formula(rng, depth - 1);
    Formula a = random_formula(rng, depth - 1);
    Formula b = random_formula(rng, depth - 1);
    return k < 8 ? (a & b) : (a | b);
}

} // namespace

TEST(Atom, StrictBecomesNonStrict) {
    EXPECT_EQ(f("x < 10").str(), "x <= 9");
    EXPECT_EQ(f("x > 10").str(), "x >= 11");
    EXPECT_EQ(f("x >= 1000000").str(), "x >= 1000000");
}

TEST(Atom, GcdReduction) {
    EXPECT_EQ(f("2*x <= 5").str(), "x <= 2");
    EXPECT_EQ(f("4*x + 6*y <= 7").str(), "2*x + 3*y <= 3");
    EXPECT_EQ(f("2*x = 4").str(), "x = 2");
    EXPECT_TRUE(f("2*x = 3").is_false());
    EXPECT_TRUE(f("2*x != 3").is_true());
}

TEST(Atom, LeadingCoefficientPositive) {
    Formula g = f("r >= x");
    EXPECT_EQ(g.kind(), FKind::Not);
    EXPECT_EQ(g.str(), "r >= x");
    EXPECT_EQ(f("x - y >= 0"), f("y <= x"));
    EXPECT_EQ(f("-x = 3"), f("x = -3"));
    EXPECT_EQ(f("y + x <= 3").str(), "x + y <= 3");
}

TEST(Atom, ConstantComparisons) {
    EXPECT_TRUE(f("3 <= 4").is_true());
    EXPECT_TRUE(f("x - x < 0").is_false());
}

TEST(Formula, Canonicalization) {
    EXPECT_EQ(f("x <= 1 & y <= 2"), f("y <= 2 & x <= 1"));
    EXPECT_EQ(f("x <= 1 & x <= 1"), f("x <= 1"));
    EXPECT_TRUE(f("x <= 1 & !(x <= 1)").is_false());
    EXPECT_TRUE(f("x <= 1 | x >= 2").is_true());
    EXPECT_EQ(f("!!(x <= 1)"), f("x <= 1"));
    EXPECT_EQ(f("true & x = 1"), f("x = 1"));
    EXPECT_TRUE(f("false & x = 1").is_false());
    EXPECT_EQ(f("(a <= 1 & b <= 1) & c <= 1").children().size(), 3u);
}

TEST(Formula, ImplicationSugar) {
    Formula g = f("(pc = 13) -> (r >= x)");
    EXPECT_EQ(g, f("pc != 13 | r >= x"));
}

TEST(Formula, PrintParseRoundTrip) {
    std::mt19937_64 rng(3);
    for(int i = 0; i < 2000; ++i) {
        Formula g = random_formula(rng, 4);
        Formula back = parse_formula(g.str());
        ASSERT_EQ(back.str(), g.str());
    }
}

TEST(Formula, Nonlinear) {
    Formula g = f("2*x*y + y*x <= 5");
    EXPECT_EQ(g.str(), "x*y <= 1");
    EXPECT_EQ(variables_of(g), (std::set<std::string>{"x", "y"}));
}

TEST(Formula, AtomCount) {
    EXPECT_EQ(atom_count(Formula::top()), 0u);
    EXPECT_EQ(atom_count(f("x <= 1 & y <= 2")), 2u);
    std::mt19937_64 rng(5);
    for(int i = 0; i < 500; ++i) {
        Formula g = random_formula(rng, 4);
        ASSERT_EQ(atom_count(g), count_atoms(g));
    }
}

TEST(Formula, Rename) {
    Formula g = rename(f("x + 2*y <= 3"), [](const std::string& v) { return v + "@0"; });
    EXPECT_EQ(g.str(), "x@0 + 2*y@0 <= 3");
}

TEST(PathFormula, AssignChain) {
    Cfa cfa = parse_cfa("vars: x;\ninit: L0;\nL0 -> L1: x := 0;\nL1 -> L2: x := x + 1;\n");
    PathFormula pf = build_path_formula(cfa.edges());
    ASSERT_EQ(pf.steps.size(), 2u);
    EXPECT_EQ(pf.steps[0], f("x@1 = 0"));
    EXPECT_EQ(pf.steps[1], f("x@2 = x@1 + 1"));
    EXPECT_EQ(pf.index("x"), 2);
}

TEST(PathFormula, AssumeFromFreshState) {
    Cfa cfa = parse_cfa("vars: x;\ninit: L0;\nL0 -> L1: assume x < 10;\n");
    PathFormula pf = build_path_formula(cfa.edges());
    EXPECT_EQ(pf.formula().str(), "x@0 <= 9");
}

TEST(PathFormula, HavocBumpsIndex) {
    Cfa cfa = parse_cfa("vars: x;\ninit: L0;\nL0 -> L1: havoc x;\nL1 -> L2: assume x > 0;\n");
    PathFormula pf = build_path_formula(cfa.edges());
    EXPECT_EQ(pf.formula().str(), "x@1 >= 1");
}

TEST(PathFormula, SevenEdgeChainAtomCount) {
    Cfa cfa = parse_cfa(R"(vars: x, y;
init: L0;
error: L7;
L0 -> L1: havoc x;
L1 -> L2: y := x + 1;
L2 -> L3: assume y > 2 & x < 9;
L3 -> L4: x := x * y;
L4 -> L5: assume x != 4;
L5 -> L6: y := 2 * y - x;
L6 -> L7: assume y <= 0 | x >= 7;
)");
    PathFormula pf = build_path_formula(cfa.edges());
    EXPECT_EQ(pf.steps.size(), 7u);
    std::size_t oracle = 0;
    for(const auto& s : pf.steps)
        oracle += count_atoms(s);
    EXPECT_EQ(atom_count(pf), oracle);
    EXPECT_EQ(atom_count(pf), 8u);
}
