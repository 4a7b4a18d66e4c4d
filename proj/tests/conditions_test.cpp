#include <cmc/conditions.hpp>
#include <cmc/frontend.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace cmc;

namespace {

const Cfa& fixture() {
    static const Cfa cfa = parse_cfa("vars: x;\ninit: L0;\nL0 -> L1: x := 1;\nL1 -> L1: assume x < 3;\n"
                                     "L1 -> L2: x := x + 1;\n");
    return cfa;
}

const Edge& to_l1() { return fixture().edges()[1]; }

} // namespace

TEST(Repeat, TransferExamples) {
    RepeatState s{{{LocationId{1}, 2}}, false};
    RepeatState t = repeat_transfer(s, to_l1(), 3);
    EXPECT_EQ(t.counts.at(LocationId{1}), 3u);
    EXPECT_FALSE(t.exceeded);
    EXPECT_TRUE(repeat_transfer(t, to_l1(), 3).exceeded);
    EXPECT_TRUE(repeat_transfer(RepeatState{}, fixture().edges()[0], 0).exceeded);
}

TEST(Repeat, ExceededIsSticky) {
    RepeatState s = repeat_transfer(RepeatState{}, to_l1(), 0);
    ASSERT_TRUE(s.exceeded);
    EXPECT_TRUE(repeat_transfer(s, fixture().edges()[2], 100).exceeded);
}

TEST(Repeat, MergeIsPointwiseMax) {
    RepeatState a{{{LocationId{1}, 2}}, false};
    RepeatState b{{{LocationId{1}, 5}}, false};
    EXPECT_EQ(repeat_merge(a, b).counts.at(LocationId{1}), 5u);
    EXPECT_EQ(repeat_merge(a, a), a);
    std::mt19937_64 rng(1);
    for(int k = 0; k < 100; ++k) {
        RepeatState x, y;
        for(std::uint32_t l = 0; l < 4; ++l) {
            if(rng() % 2)
                x.counts[LocationId{l}] = static_cast<std::uint32_t>(rng() % 6);
            if(rng() % 2)
                y.counts[LocationId{l}] = static_cast<std::uint32_t>(rng() % 6);
        }
        x.exceeded = rng() % 2;
        y.exceeded = rng() % 2;
        EXPECT_EQ(repeat_merge(x, y), repeat_merge(y, x));
    }
}

TEST(Repeat, StopIsTrue) {
    EXPECT_TRUE(repeat_stop(RepeatState{}, {}));
    EXPECT_TRUE(repeat_stop(RepeatState{{}, true}, {RepeatState{}}));
}

TEST(PathStats, TransferExamples) {
    PathLimits limits{7, std::nullopt};
    PathStatsState s{6, 0, false};
    PathStatsState t = pathstats_transfer(s, fixture().edges()[0], limits);
    EXPECT_EQ(t.path_length, 7u);
    EXPECT_FALSE(t.exceeded);
    EXPECT_TRUE(pathstats_transfer(t, fixture().edges()[0], limits).exceeded);

    PathLimits assumes{std::nullopt, 10};
    PathStatsState a = pathstats_transfer(PathStatsState{}, fixture().edges()[0], assumes);
    EXPECT_EQ(a.assume_edges, 0u);
    a = pathstats_transfer(a, to_l1(), assumes);
    EXPECT_EQ(a.assume_edges, 1u);
    EXPECT_EQ(a.path_length, 0u); // no length limit configured
}

TEST(PathStats, MergeTakesMax) {
    PathStatsState a{3, 1, false}, b{2, 4, true};
    PathStatsState m = pathstats_merge(a, b);
    EXPECT_EQ(m.path_length, 3u);
    EXPECT_EQ(m.assume_edges, 4u);
    EXPECT_TRUE(m.exceeded);
}

TEST(Monitor, ReachedLimit) {
    GlobalMonitor m({.max_reached = 100});
    EXPECT_EQ(m.should_halt(100), MonitorDecision::Continue);
    EXPECT_EQ(m.should_halt(101), MonitorDecision::HaltGlobal);
    EXPECT_EQ(m.should_halt(0), MonitorDecision::HaltGlobal);
    EXPECT_TRUE(m.halted());
}

TEST(Monitor, NoThresholds) {
    GlobalMonitor m;
    for(int k = 0; k < 1000; ++k) {
        EXPECT_EQ(m.should_halt(static_cast<std::size_t>(k) * 1000), MonitorDecision::Continue);
        EXPECT_EQ(m.busy_edge_check(to_l1()), EdgeDecision::Proceed);
        EXPECT_FALSE(m.fuel_exhausted());
    }
}

TEST(Monitor, FuelIsExact) {
    GlobalMonitor m({.max_fuel = 500});
    int posts = 0;
    while(!m.fuel_exhausted()) {
        m.busy_edge_check(to_l1());
        ++posts;
    }
    EXPECT_EQ(posts, 500);
    EXPECT_EQ(m.should_halt(0), MonitorDecision::HaltGlobal);
}

TEST(Monitor, BusyEdge) {
    GlobalMonitor m({.busy_edge_limit = 3});
    for(int k = 0; k < 3; ++k)
        EXPECT_EQ(m.busy_edge_check(to_l1()), EdgeDecision::Proceed);
    EXPECT_EQ(m.busy_edge_check(fixture().edges()[0]), EdgeDecision::Proceed);
    EXPECT_EQ(m.busy_edge_check(to_l1()), EdgeDecision::SkipWithAssumption);
}
