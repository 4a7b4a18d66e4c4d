#pragma once

#include <cmc/cfa.hpp>

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace cmc {

// Visits per location along a path; the flag is sticky.
struct RepeatState {
    std::map<LocationId, std::uint32_t> counts;
    bool exceeded = false;

    friend auto operator<=>(const RepeatState&, const RepeatState&) = default;
};

RepeatState repeat_transfer(const RepeatState& s, const Edge& g, std::uint32_t k);
RepeatState repeat_merge(const RepeatState& a, const RepeatState& b);
inline bool repeat_stop(const RepeatState&, const std::vector<RepeatState>&) { return true; }

struct PathLimits {
    std::optional<std::uint32_t> path_length;
    std::optional<std::uint32_t> assume_edges;
};

// Counters whose limit is unset stay at zero so they never block merging.
struct PathStatsState {
    std::uint32_t path_length = 0;
    std::uint32_t assume_edges = 0;
    bool exceeded = false;

    friend auto operator<=>(const PathStatsState&, const PathStatsState&) = default;
};

PathStatsState pathstats_transfer(const PathStatsState& s, const Edge& g, const PathLimits& limits);
PathStatsState pathstats_merge(const PathStatsState& a, const PathStatsState& b);
inline bool pathstats_stop(const PathStatsState&, const std::vector<PathStatsState>&) {
    return true;
}

struct MonitorLimits {
    std::optional<std::size_t> max_reached{};
    std::optional<double> soft_time_seconds{};
    std::optional<std::size_t> max_fuel{};
    std::optional<std::size_t> busy_edge_limit{};
    std::optional<std::size_t> path_formula_atom_limit{};
};

enum class MonitorDecision { Continue, HaltGlobal };
enum class EdgeDecision { Proceed, SkipWithAssumption };

// Global progress counters of one analysis run.
class GlobalMonitor {
  public:
    explicit GlobalMonitor(MonitorLimits limits = {});

    const MonitorLimits& limits() const { return m_limits; }

    // Polled once per iteration of the reachability loop.
    MonitorDecision should_halt(std::size_t reached_size);
    // Fuel check before a post computation.
    bool fuel_exhausted() const;
    // Counts one post computation along g.
    EdgeDecision busy_edge_check(const Edge& g);

    bool halted() const { return m_halted; }
    std::size_t fuel_spent() const { return m_fuel; }
    double elapsed_seconds() const;

  private:
    MonitorLimits m_limits;
    std::chrono::steady_clock::time_point m_start;
    std::size_t m_fuel = 0;
    std::map<EdgeId, std::size_t> m_edge_posts;
    bool m_halted = false;
};

} // namespace cmc
