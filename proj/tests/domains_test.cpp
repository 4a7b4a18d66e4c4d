#include <cmc/domains.hpp>
#include <cmc/frontend.hpp>
#include <cmc/oracle.hpp>

#include "random_program.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cmc;

namespace {

Cfa edges_cfa(const std::string& body) {
    return parse_cfa("vars: x, y, i;\ninit: L0;\n" + body);
}

// The predicate underlying a literal; `x >= 3` tracks the atom `x <= 2`.
Atom atom_of(const std::string& text) {
    Formula f = parse_formula(text);
    EXPECT_TRUE(f.is_literal()) << text;
    return f.kind() == FKind::Not ? f.operand().as_atom() : f.as_atom();
}

} // namespace

TEST(Location, Transfer) {
    Cfa cfa = edges_cfa("L0 -> L1: x := 1;\nL2 -> L3: x := 2;\n");
    auto out = location_transfer(LocationId{0}, cfa.edges()[0]);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0], LocationId{1});
    EXPECT_TRUE(location_transfer(LocationId{0}, cfa.edges()[1]).empty());
    auto top = location_transfer(std::nullopt, cfa.edges()[1]);
    ASSERT_EQ(top.size(), 1u);
    EXPECT_EQ(top[0], LocationId{3});
}

TEST(Explicit, TransferExamples) {
    Cfa cfa = edges_cfa("L0 -> L1: x := x + 2;\nL0 -> L1: assume x < 10;\nL0 -> L1: assume x < 3;\n"
                        "L0 -> L1: havoc x;\nL0 -> L1: y := x * x;\n");
    auto add = explicit_transfer({{{"x", 1}}}, cfa.edges()[0]);
    ASSERT_EQ(add.size(), 1u);
    EXPECT_EQ(add[0].values.at("x"), 3);

    auto unknown = explicit_transfer({}, cfa.edges()[1]);
    ASSERT_EQ(unknown.size(), 1u);
    EXPECT_TRUE(unknown[0].values.empty());

    EXPECT_TRUE(explicit_transfer({{{"x", 5}}}, cfa.edges()[2]).empty());

    auto havoc = explicit_transfer({{{"x", 5}, {"y", 1}}}, cfa.edges()[3]);
    ASSERT_EQ(havoc.size(), 1u);
    EXPECT_FALSE(havoc[0].values.contains("x"));
    EXPECT_EQ(havoc[0].values.at("y"), 1);

    auto square = explicit_transfer({{{"x", 5}}}, cfa.edges()[4]);
    EXPECT_EQ(square[0].values.at("y"), 25);
    auto unknown_square = explicit_transfer({}, cfa.edges()[4]);
    EXPECT_FALSE(unknown_square[0].values.contains("y"));
}

TEST(Explicit, OverflowBecomesTop) {
    Cfa cfa = edges_cfa("L0 -> L1: x := x * x;\n");
    bool overflowed = false;
    auto out = explicit_transfer({{{"x", Value{1} << 40}}}, cfa.edges()[0], &overflowed);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_FALSE(out[0].values.contains("x"));
    EXPECT_TRUE(overflowed);
}

TEST(Explicit, StopExamples) {
    ExplicitState one{{{"x", 1}}};
    ExplicitState top{};
    EXPECT_TRUE(explicit_stop(one, {one}));
    EXPECT_TRUE(explicit_stop(one, {top}));
    EXPECT_FALSE(explicit_stop(top, {one}));
    EXPECT_FALSE(explicit_stop(one, {}));
}

TEST(Explicit, CoverKeysFindEveryCoveringState) {
    ExplicitState s{{{"x", 1}, {"y", 2}, {"i", 3}}};
    auto keys = explicit_cover_keys(s);
    EXPECT_EQ(keys.size(), 8u);
    for(const ExplicitState& c : {ExplicitState{}, ExplicitState{{{"x", 1}}},
                                  ExplicitState{{{"y", 2}, {"i", 3}}}, s}) {
        ASSERT_TRUE(explicit_covers(c, s));
        EXPECT_NE(std::find(keys.begin(), keys.end(), explicit_key(c)), keys.end());
    }
}

TEST(Explicit, Render) {
    EXPECT_EQ(render({}), Formula::top());
    EXPECT_EQ(render({{{"x", 1}, {"y", -2}}}), parse_formula("x = 1 & y = -2"));
}

// Fully defined states: the abstract and concrete steps coincide.
TEST(Explicit, AgreesWithConcreteStep) {
    std::mt19937_64 rng(7);
    cmc::testing::GeneratorOptions opts;
    opts.nonlinear = true;
    opts.havoc = false;
    int compared = 0;
    std::uniform_int_distribution<Value> value(-6, 6);
    while(compared < 1000) {
        Cfa cfa = cmc::testing::random_cfa(rng, opts);
        for(const Edge& g : cfa.edges()) {
            oracle::ConcreteState c{g.source, {}};
            ExplicitState e;
            for(const auto& v : cfa.variables()) {
                c.store[v] = value(rng);
                e.values[v] = c.store[v];
            }
            auto concrete = oracle::step(c, g);
            auto abstract = explicit_transfer(e, g);
            ASSERT_EQ(concrete.has_value(), !abstract.empty()) << op_str(g.op);
            if(concrete) {
                EXPECT_EQ(concrete->store, abstract[0].values) << op_str(g.op);
            }
            ++compared;
        }
    }
}

TEST(Predicate, TransferExamples) {
    Solver solver;
    Cfa cfa = edges_cfa("L0 -> L1: assume i >= 1000000;\nL0 -> L1: assume x >= 1;\nL0 -> L1: x := 5;\n");
    Precision prec;
    prec.add(LocationId{1}, atom_of("i >= 1000000"));
    auto loop_exit = predicate_transfer({Formula::top()}, cfa.edges()[0], prec, solver);
    ASSERT_EQ(loop_exit.size(), 1u);
    EXPECT_EQ(loop_exit[0].abstraction, parse_formula("i >= 1000000"));

    EXPECT_TRUE(predicate_transfer({parse_formula("x <= 0")}, cfa.edges()[1], prec, solver).empty());

    Precision two;
    two.add(LocationId{1}, atom_of("x >= 3"));
    two.add(LocationId{1}, atom_of("x <= 3"));
    auto assign = predicate_transfer({Formula::top()}, cfa.edges()[2], two, solver);
    ASSERT_EQ(assign.size(), 1u);
    EXPECT_EQ(assign[0].abstraction, parse_formula("x >= 3 & !(x <= 3)"));
}

TEST(Predicate, EmptyPrecisionGivesTrue) {
    Solver solver;
    Cfa cfa = edges_cfa("L0 -> L1: x := 5;\n");
    auto out = predicate_transfer({parse_formula("x <= 0")}, cfa.edges()[0], Precision{}, solver);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(out[0].abstraction.is_true());
}

TEST(Predicate, StopExamples) {
    Solver solver;
    EXPECT_TRUE(predicate_stop({parse_formula("x >= 5")}, {{parse_formula("x >= 1")}}, solver));
    EXPECT_FALSE(predicate_stop({Formula::top()}, {{parse_formula("x >= 1")}}, solver));
    EXPECT_TRUE(predicate_stop({parse_formula("x >= 1")}, {{parse_formula("x >= 5")}, {Formula::top()}}, solver));
}

namespace {

std::vector<Atom> random_atoms(std::mt19937_64& rng, std::size_t n, const std::vector<std::string>& vars) {
    std::uniform_int_distribution<int> coef(-2, 2), rhs(-4, 4), rel(0, 4);
    std::vector<Atom> out;
    while(out.size() < n) {
        Poly lhs;
        for(const auto& v : vars)
            lhs = lhs + Poly::value(coef(rng)) * Poly::var(v);
        Formula f = Formula::compare(lhs, rel(rng) == 0 ? ExprKind::Eq : ExprKind::Le,
                                     Poly::value(rhs(rng)));
        if(f.kind() == FKind::Atom)
            out.push_back(f.as_atom());
    }
    return out;
}

} // namespace

// Every concrete successor of a state in the abstraction lies in the result.
TEST(Predicate, OverApproximatesPostImage) {
    std::mt19937_64 rng(11);
    cmc::testing::GeneratorOptions opts;
    opts.max_vars = 3;
    Solver solver;
    int checked = 0;
    for(int round = 0; round < 60; ++round) {
        Cfa cfa = cmc::testing::random_cfa(rng, opts);
        for(const Edge& g : cfa.edges()) {
            if(std::holds_alternative<Havoc>(g.op))
                continue;
            Precision after;
            std::vector<Atom> atoms = random_atoms(rng, 3, cfa.variables());
            std::vector<Formula> pre_atoms;
            for(std::size_t k = 0; k < atoms.size(); ++k) {
                if(k < 2)
                    pre_atoms.push_back(Formula::atom(atoms[k]));
                after.add(g.target, atoms[k]);
            }
            PredicateState s{conj(pre_atoms)};
            std::vector<PredicateState> out;
            try {
                out = predicate_transfer(s, g, after, solver);
            } catch(const AbstractionFailure&) {
                continue;
            }
            std::vector<std::string> vars = cfa.variables();
            for(const auto& model : oracle::box_models(s.abstraction, vars, 3)) {
                auto next = oracle::step({g.source, model}, g);
                if(!next)
                    continue;
                ASSERT_FALSE(out.empty()) << op_str(g.op) << " from " << s.abstraction.str();
                EXPECT_TRUE(oracle::evaluate(out[0].abstraction, next->store))
                    << op_str(g.op) << " from " << s.abstraction.str() << " gave "
                    << out[0].abstraction.str();
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 500);
}

TEST(Predicate, CartesianIsWeakerThanExact) {
    std::mt19937_64 rng(5);
    Solver solver;
    const std::vector<std::string> vars{"x", "y", "i"};
    for(int round = 0; round < 200; ++round) {
        std::vector<Atom> atoms = random_atoms(rng, 4, vars);
        std::vector<Formula> preds;
        for(const auto& a : atoms)
            preds.push_back(Formula::atom(a));
        std::vector<Atom> sp_atoms = random_atoms(rng, 2, vars);
        Formula sp = Formula::atom(sp_atoms[0]) & !Formula::atom(sp_atoms[1]);
        auto exact = abstract_formula(sp, preds, preds, solver, {8});
        auto cartesian = abstract_formula(sp, preds, preds, solver, {0});
        if(!exact)
            continue;
        ASSERT_TRUE(cartesian);
        EXPECT_EQ(solver.entails(*exact, *cartesian), Entailment::Yes)
            << exact->str() << " vs " << cartesian->str();
    }
}

TEST(Predicate, MintermMinimizer) {
    // f(a, b) = a: minterms 0b01 and 0b11
    auto cover = minimize_minterms({1, 3}, 2);
    ASSERT_EQ(cover.size(), 1u);
    EXPECT_EQ(cover[0], (std::pair<unsigned, unsigned>{1, 1}));

    std::mt19937_64 rng(3);
    for(int round = 0; round < 200; ++round) {
        unsigned n = 1 + static_cast<unsigned>(rng() % 5);
        std::vector<unsigned> minterms;
        for(unsigned m = 0; m < (1u << n); ++m)
            if(rng() % 2)
                minterms.push_back(m);
        auto implicants = minimize_minterms(minterms, n);
        for(unsigned m = 0; m < (1u << n); ++m) {
            bool in = std::find(minterms.begin(), minterms.end(), m) != minterms.end();
            bool covered = std::any_of(implicants.begin(), implicants.end(),
                                       [&](auto& imp) { return (m & imp.second) == imp.first; });
            ASSERT_EQ(in, covered) << "n=" << n << " m=" << m;
        }
    }
}

TEST(Precision, DumpLoadRoundTrip) {
    Precision p;
    EXPECT_TRUE(p.add(LocationId{5}, atom_of("x >= 1000000")));
    EXPECT_FALSE(p.add(LocationId{5}, atom_of("x >= 1000000")));
    EXPECT_TRUE(p.add_global(atom_of("y <= 0")));
    EXPECT_EQ(p.size(), 2u);
    EXPECT_EQ(p.at(LocationId{5}).size(), 2u);
    EXPECT_EQ(p.at(LocationId{1}).size(), 1u);
    std::string text = p.dump();
    EXPECT_NE(text.find("loc L5: "), std::string::npos);
    EXPECT_NE(text.find("global: "), std::string::npos);
    EXPECT_EQ(Precision::load(text), p);
    EXPECT_EQ(Precision::load(text).dump(), text);
}
