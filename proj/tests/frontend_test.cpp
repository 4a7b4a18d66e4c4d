#include <cmc/frontend.hpp>

#include "random_program.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace cmc;

namespace {

std::size_t count_ops(const Cfa& cfa, auto pred) {
    return static_cast<std::size_t>(std::count_if(cfa.edges().begin(), cfa.edges().end(),
                                                  [&](const Edge& g) { return pred(g.op); }));
}

} // namespace

TEST(Frontend, AssertDesugaring) {
    Cfa cfa = parse_program("int x; x := 0; assert(x == 0);");
    EXPECT_EQ(cfa.variables(), std::vector<std::string>{"x"});
    EXPECT_EQ(cfa.locations().size(), 4u);
    EXPECT_EQ(cfa.error_locations().size(), 1u);
    ASSERT_EQ(cfa.edges().size(), 3u);
    EXPECT_EQ(op_str(cfa.edges()[0].op), "x := 0");
    EXPECT_EQ(op_str(cfa.edges()[1].op), "assume x != 0");
    EXPECT_TRUE(cfa.is_error(cfa.edges()[1].target));
    EXPECT_EQ(op_str(cfa.edges()[2].op), "assume x == 0");
    EXPECT_FALSE(cfa.is_error(cfa.edges()[2].target));
}

TEST(Frontend, LoopHeadHasTwoAssumeEdges) {
    Cfa cfa = parse_program("int i; i := 0; while (i < 3) { i := i + 1; } assert(i == 3);");
    LocationId head = cfa.edges()[0].target;
    auto out = cfa.outgoing(head);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(op_str(cfa.edge(out[0]).op), "assume i < 3");
    EXPECT_EQ(op_str(cfa.edge(out[1]).op), "assume i >= 3");
    // the body jumps back to the head
    const Edge& body = cfa.edge(cfa.outgoing(cfa.edge(out[0]).target)[0]);
    EXPECT_EQ(body.target, head);
}

TEST(Frontend, LoopAndSquareHasTwoErrorLocations) {
    Cfa cfa = load_program(CMC_PROGRAMS_DIR "/loop_and_square.imp");
    EXPECT_EQ(cfa.error_locations().size(), 2u);
    EXPECT_EQ(count_ops(cfa, [](const Operation& op) { return std::holds_alternative<Havoc>(op); }),
              1u);
}

TEST(Frontend, NondetDesugarsToHavoc) {
    Cfa cfa = parse_program("int x; x := nondet();");
    ASSERT_EQ(cfa.edges().size(), 1u);
    EXPECT_TRUE(std::holds_alternative<Havoc>(cfa.edges()[0].op));
}

TEST(Frontend, Errors) {
    EXPECT_THROW(parse_program("int x; y := 1;"), SyntaxError);
    EXPECT_THROW(parse_program("int x; x := nondet() + 1;"), SyntaxError);
    EXPECT_THROW(parse_program("int x; x := 1"), SyntaxError);
    EXPECT_THROW(parse_program("int x; if (x) { }"), SyntaxError);
    try {
        parse_program("int x;\nx := 1;\nx := $;");
        FAIL();
    } catch(const SyntaxError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.column(), 6);
    }
}

TEST(Frontend, BranchEdgesAreComplementary) {
    std::mt19937_64 rng(7);
    for(int n = 0; n < 100; ++n) {
        Cfa cfa = cmc::testing::random_cfa(rng);
        for(LocationId l : cfa.locations()) {
            auto out = cfa.outgoing(l);
            if(out.size() != 2)
                continue;
            const auto* a = std::get_if<Assume>(&cfa.edge(out[0]).op);
            const auto* b = std::get_if<Assume>(&cfa.edge(out[1]).op);
            ASSERT_TRUE(a && b);
            EXPECT_TRUE(negate(a->condition) == b->condition || negate(b->condition) == a->condition)
                << a->condition.str() << " vs " << b->condition.str();
        }
    }
}

TEST(CfaFormat, SingleEdge) {
    Cfa cfa = parse_cfa("vars: x;\ninit: L0;\nL0 -> L1: x := x + 1;\n");
    ASSERT_EQ(cfa.edges().size(), 1u);
    EXPECT_TRUE(std::holds_alternative<Assign>(cfa.edges()[0].op));
    EXPECT_EQ(op_str(cfa.edges()[0].op), "x := x + 1");
}

TEST(CfaFormat, UnreachableErrorLocation) {
    Cfa cfa = parse_cfa("vars: x;\ninit: L0;\nerror L9;\nL0 -> L1: havoc x;\n");
    EXPECT_TRUE(cfa.is_error(LocationId{9}));
    EXPECT_EQ(cfa.locations().size(), 3u);
}

TEST(CfaFormat, Errors) {
    EXPECT_THROW(parse_cfa("vars: x;\ninit: L0;\n[0] L0 -> L1: havoc x;\n[0] L1 -> L2: havoc x;\n"),
                 SyntaxError);
    EXPECT_THROW(parse_cfa("vars: x;\nlocs: L0, L1;\ninit: L0;\nL0 -> L5: havoc x;\n"), InvalidCfa);
    EXPECT_THROW(parse_cfa("vars: x;\ninit: L0;\nL0 -> L1: y := 1;\n"), SyntaxError);
}

TEST(CfaFormat, RoundTripTwentyEdgeFixture) {
    const char* fixture = R"(vars: a, b, c;
init: L0;
error: L19, L20;
L0 -> L1: havoc a;
L1 -> L2: b := a * 2 - 3;
L2 -> L3: assume a < b & b != 4;
L2 -> L4: assume !(a < b & b != 4);
L3 -> L5: c := -a;
L4 -> L5: c := a - -2;
L5 -> L6: assume c >= 0 | a = 1;
L5 -> L7: assume c < 0 & a != 1;
L6 -> L8: a := a + 1;
L7 -> L8: a := (a + 1) * (b - 1);
L8 -> L9: assume a <= 10;
L8 -> L10: assume a > 10;
L9 -> L8: a := a + 2;
L10 -> L11: havoc c;
L11 -> L12: assume c == 3;
L11 -> L13: assume c != 3;
L12 -> L19: assume a - b > c;
L12 -> L14: assume a - b <= c;
L13 -> L20: assume -(a + b) >= 7;
L13 -> L14: assume true;
)";
    Cfa cfa = parse_cfa(fixture);
    ASSERT_EQ(cfa.edges().size(), 20u);
    std::string once = serialize_cfa(cfa);
    Cfa again = parse_cfa(once);
    EXPECT_EQ(serialize_cfa(again), once);
    for(std::size_t i = 0; i < 20; ++i)
        EXPECT_EQ(op_str(cfa.edges()[i].op), op_str(again.edges()[i].op));
    EXPECT_EQ(cfa.fingerprint(), again.fingerprint());
}

TEST(CfaFormat, RoundTripGeneratedPrograms) {
    std::mt19937_64 rng(11);
    for(int n = 0; n < 200; ++n) {
        cmc::testing::GeneratorOptions options;
        options.nonlinear = n % 2 == 0;
        Cfa cfa = cmc::testing::random_cfa(rng, options);
        std::string text = serialize_cfa(cfa);
        Cfa parsed = parse_cfa(text);
        ASSERT_EQ(serialize_cfa(parsed), text);
        ASSERT_EQ(parsed.edges().size(), cfa.edges().size());
        for(std::size_t i = 0; i < cfa.edges().size(); ++i) {
            const Edge& a = cfa.edges()[i];
            const Edge& b = parsed.edges()[i];
            ASSERT_EQ(a.source, b.source);
            ASSERT_EQ(a.target, b.target);
            ASSERT_EQ(op_str(a.op), op_str(b.op));
        }
    }
}
