#include <cmc/frontend.hpp>
#include <cmc/oracle.hpp>
#include <cmc/path_formula.hpp>
#include <cmc/solver.hpp>

#include "random_program.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cmc;

namespace {

Formula f(const char* text) { return parse_formula(text); }

const std::vector<std::string> xyz = {"x", "y", "z"};

Poly random_linear(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coeff(-4, 4);
    Poly p;
    for(const auto& v : xyz)
        p = p + Poly::value(coeff(rng)) * Poly::var(v);
    return p;
}

Formula random_atom(std::mt19937_64& rng) {
    static const ExprKind rel[] = {ExprKind::Lt, ExprKind::Le, ExprKind::Eq,
                                   ExprKind::Ne, ExprKind::Ge, ExprKind::Gt};
    std::uniform_int_distribution<int> k(-8, 8);
    std::uniform_int_distribution<std::size_t> r(0, 5);
    return Formula::compare(random_linear(rng), rel[r(rng)], Poly::value(k(rng)));
}

Formula random_formula(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    int k = pick(rng);
    if(depth == 0 || k < 4)
        return random_atom(rng);
    if(k == 4)
        return !random_formula(rng, depth - 1);
    Formula a = random_formula(rng, depth - 1);
    Formula b = random_formula(rng, depth - 1);
    return k < 8 ? (a & b) : (a | b);
}

Formula box(Value b) {
    std::vector<Formula> parts;
    for(const auto& v : xyz) {
        parts.push_back(Formula::compare(Poly::var(v), ExprKind::Le, Poly::value(b)));
        parts.push_back(Formula::compare(Poly::var(v), ExprKind::Ge, Poly::value(-b)));
    }
    return conj(parts);
}

} // namespace

TEST(Solver, SpecExamples) {
    EXPECT_EQ(is_satisfiable(f("x <= 0 & x >= 1")), SatResult::Unsat);
    EXPECT_EQ(is_satisfiable(f("x + y <= 5 & x >= 3 & y >= 3")), SatResult::Unsat);
    EXPECT_EQ(is_satisfiable(f("x >= 3 & x + y <= 5")), SatResult::Sat);
}

TEST(Solver, TwoXEqualsThreeHasNoWitness) {
    // exhaustive scan oracle: no integer in [-32, 32] satisfies 2x = 3
    Formula g = Formula::compare(Poly::value(2) * Poly::var("x"), ExprKind::Eq, Poly::value(3));
    EXPECT_TRUE(oracle::box_models(g, {"x"}, 32).empty());
    EXPECT_NE(is_satisfiable(g), SatResult::Sat);
}

TEST(Solver, RationallyFeasibleIntegerInfeasibleIsNotSat) {
    // Pugh's example: a real shadow exists but no integer point
    Formula g = f("27 <= 11*x + 13*y & 11*x + 13*y <= 45 & -10 <= 7*x - 9*y & 7*x - 9*y <= 4");
    EXPECT_TRUE(oracle::box_models(g, {"x", "y"}, 40).empty());
    SatResult r = is_satisfiable(g);
    EXPECT_NE(r, SatResult::Sat);
}

TEST(Solver, WitnessIsAModel) {
    SatOutcome r = check_sat(f("x >= 5 & y = x + 3 & z*x <= 2 & (x <= 6 | y >= 100)"));
    ASSERT_EQ(r.result, SatResult::Sat);
    EXPECT_TRUE(r.model.at("x") >= 5 && r.model.at("x") <= 6);
    EXPECT_EQ(r.model.at("y"), r.model.at("x") + 3);
    EXPECT_LE(r.model.at("x*z"), 2);
}

TEST(Solver, ClauseBound) {
    std::vector<Formula> parts;
    for(int i = 0; i < 14; ++i) {
        std::string v = "v" + std::to_string(i);
        parts.push_back(parse_formula(v + " <= 0 | " + v + " >= 5"));
    }
    SolverOptions small;
    small.clause_bound = 4096;
    EXPECT_THROW(is_satisfiable(conj(parts), small), FormulaTooLarge);
    EXPECT_EQ(entails(conj(parts), f("v0 <= 100"), small), Entailment::Unknown);
}

TEST(Solver, EntailsExamples) {
    EXPECT_EQ(entails(f("x = 3"), f("x >= 1")), Entailment::Yes);
    EXPECT_EQ(entails(Formula::top(), f("x >= 1")), Entailment::Unknown);
    EXPECT_EQ(entails(f("x >= 1000000"), f("x >= 1")), Entailment::Yes);
}

TEST(Solver, UnsatIsSound) {
    std::mt19937_64 rng(1);
    int unsat = 0;
    for(int i = 0; i < 1000; ++i) {
        Formula g = random_formula(rng, 3);
        SatOutcome r;
        try {
            r = check_sat(g);
        } catch(const FormulaTooLarge&) {
            continue;
        }
        if(r.result == SatResult::Unsat) {
            ++unsat;
            ASSERT_TRUE(oracle::box_models(g, xyz, 8).empty()) << g.str();
        }
        if(r.result == SatResult::Sat) {
            ASSERT_TRUE(oracle::evaluate(g, r.model)) << g.str();
        }
    }
    EXPECT_GT(unsat, 30);
}

TEST(Solver, CompleteOnBoxes) {
    std::mt19937_64 rng(2);
    int sat = 0;
    for(int i = 0; i < 400; ++i) {
        std::vector<Formula> parts{box(8)};
        int n = std::uniform_int_distribution<int>(1, 4)(rng);
        for(int k = 0; k < n; ++k)
            parts.push_back(random_atom(rng));
        Formula g = conj(parts);
        bool has_model = !oracle::box_models(g, xyz, 8).empty();
        SatResult r = is_satisfiable(g);
        if(has_model) {
            ++sat;
            ASSERT_EQ(r, SatResult::Sat) << g.str();
        } else {
            // the box bounds every variable, so the search is exhaustive
            ASSERT_EQ(r, SatResult::Unsat) << g.str();
        }
    }
    EXPECT_GT(sat, 100);
}

TEST(Solver, EntailsReflexiveAndTransitive) {
    std::mt19937_64 rng(4);
    for(int i = 0; i < 200; ++i) {
        Formula a = random_formula(rng, 2);
        ASSERT_EQ(entails(a, a), Entailment::Yes) << a.str();
    }
    int chains = 0;
    for(int i = 0; i < 3000 && chains < 30; ++i) {
        Formula a = random_atom(rng) & random_atom(rng);
        Formula b = random_atom(rng);
        Formula c = random_atom(rng) | b;
        if(entails(a, b) == Entailment::Yes && entails(b, c) == Entailment::Yes) {
            ++chains;
            ASSERT_EQ(entails(a, c), Entailment::Yes);
        }
    }
    EXPECT_GE(chains, 30);
}

TEST(Solver, MemoizingSolverAgrees) {
    std::mt19937_64 rng(6);
    Solver solver;
    for(int i = 0; i < 200; ++i) {
        Formula g = random_formula(rng, 2);
        ASSERT_EQ(solver.is_satisfiable(g), is_satisfiable(g));
        ASSERT_EQ(solver.is_satisfiable(g), is_satisfiable(g));
    }
}

namespace {

// Depth-first search for an execution of the path from any initial store in
// [-r, r], with havoc values in the same range.
bool executable(const Cfa& cfa, const std::vector<Edge>& path, Value r) {
    std::vector<std::string> vars = cfa.variables();
    std::function<bool(std::size_t, std::map<std::string, Value>&)> init =
        [&](std::size_t k, std::map<std::string, Value>& store) -> bool {
        if(k == vars.size()) {
            std::function<bool(std::size_t, oracle::ConcreteState)> run =
                [&](std::size_t i, oracle::ConcreteState c) -> bool {
                if(i == path.size())
                    return true;
                const Edge& g = path[i];
                if(const auto* h = std::get_if<Havoc>(&g.op)) {
                    for(Value v = -r; v <= r; ++v) {
                        oracle::ConcreteState next = c;
                        next.pc = g.target;
                        next.store[h->var] = v;
                        if(run(i + 1, next))
                            return true;
                    }
                    return false;
                }
                auto next = oracle::step(c, g);
                return next && run(i + 1, *next);
            };
            return run(0, oracle::ConcreteState{path.front().source, store});
        }
        for(Value v = -r; v <= r; ++v) {
            store[vars[k]] = v;
            if(init(k + 1, store))
                return true;
        }
        return false;
    };
    std::map<std::string, Value> store;
    return init(0, store);
}

} // namespace

TEST(PathFormula, SatisfiableIffExecutable) {
    std::mt19937_64 rng(9);
    cmc::testing::GeneratorOptions options;
    options.max_vars = 2;
    int executable_paths = 0;
    int infeasible_paths = 0;
    for(int n = 0; n < 150; ++n) {
        Cfa cfa = cmc::testing::random_cfa(rng, options);
        // random walk of up to 12 edges
        std::vector<Edge> path;
        LocationId at = cfa.initial();
        std::size_t len = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
        while(path.size() < len) {
            auto out = cfa.outgoing(at);
            if(out.empty())
                break;
            EdgeId id = out[std::uniform_int_distribution<std::size_t>(0, out.size() - 1)(rng)];
            path.push_back(cfa.edge(id));
            at = cfa.edge(id).target;
        }
        if(path.empty())
            continue;
        PathFormula pf = build_path_formula(path);
        SatOutcome r = check_sat(pf.formula());
        bool concrete = executable(cfa, path, 6);
        if(concrete) {
            ++executable_paths;
            ASSERT_EQ(r.result, SatResult::Sat) << serialize_cfa(cfa);
        }
        if(r.result == SatResult::Unsat) {
            ++infeasible_paths;
            ASSERT_FALSE(concrete);
        }
        if(r.result == SatResult::Sat) {
            // replay the model: initial store from index 0, havocs from their new index
            std::map<std::string, Value> store;
            for(const auto& v : cfa.variables())
                store[v] = r.model.count(ssa_name(v, 0)) ? r.model.at(ssa_name(v, 0)) : 0;
            oracle::ConcreteState c{path.front().source, store};
            std::map<std::string, int> idx;
            for(const Edge& g : path) {
                if(const auto* h = std::get_if<Havoc>(&g.op)) {
                    int k = ++idx[h->var];
                    std::string name = ssa_name(h->var, k);
                    c.store[h->var] = r.model.count(name) ? r.model.at(name) : 0;
                    c.pc = g.target;
                    continue;
                }
                if(const auto* a = std::get_if<Assign>(&g.op))
                    ++idx[a->var];
                auto next = oracle::step(c, g);
                ASSERT_TRUE(next.has_value()) << pf.formula().str();
                c = *next;
            }
        }
    }
    EXPECT_GT(executable_paths, 30);
    EXPECT_GT(infeasible_paths, 10);
}
