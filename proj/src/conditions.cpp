#include <cmc/conditions.hpp>

#include <algorithm>

namespace cmc {

RepeatState repeat_transfer(const RepeatState& s, const Edge& g, std::uint32_t k) {
    RepeatState next = s;
    std::uint32_t c = ++next.counts[g.target];
    next.exceeded = s.exceeded || c > k;
    return next;
}

RepeatState repeat_merge(const RepeatState& a, const RepeatState& b) {
    RepeatState out = b;
    for(auto& [l, c] : a.counts) {
        std::uint32_t& slot = out.counts[l];
        slot = std::max(slot, c);
    }
    out.exceeded = a.exceeded || b.exceeded;
    return out;
}

PathStatsState pathstats_transfer(const PathStatsState& s, const Edge& g, const PathLimits& limits) {
    PathStatsState next = s;
    if(limits.path_length) {
        ++next.path_length;
        next.exceeded = next.exceeded || next.path_length > *limits.path_length;
    }
    if(limits.assume_edges && is_assume(g.op)) {
        ++next.assume_edges;
        next.exceeded = next.exceeded || next.assume_edges > *limits.assume_edges;
    }
    return next;
}

PathStatsState pathstats_merge(const PathStatsState& a, const PathStatsState& b) {
    return {std::max(a.path_length, b.path_length), std::max(a.assume_edges, b.assume_edges),
            a.exceeded || b.exceeded};
}

GlobalMonitor::GlobalMonitor(MonitorLimits limits)
    : m_limits(limits), m_start(std::chrono::steady_clock::now()) {}

double GlobalMonitor::elapsed_seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - m_start).count();
}

MonitorDecision GlobalMonitor::should_halt(std::size_t reached_size) {
    if(!m_halted) {
        if(m_limits.max_reached && reached_size > *m_limits.max_reached)
            m_halted = true;
        else if(fuel_exhausted())
            m_halted = true;
        else if(m_limits.soft_time_seconds && elapsed_seconds() > *m_limits.soft_time_seconds)
            m_halted = true;
    }
    return m_halted ? MonitorDecision::HaltGlobal : MonitorDecision::Continue;
}

bool GlobalMonitor::fuel_exhausted() const {
    return m_limits.max_fuel && m_fuel >= *m_limits.max_fuel;
}

EdgeDecision GlobalMonitor::busy_edge_check(const Edge& g) {
    ++m_fuel;
    std::size_t c = ++m_edge_posts[g.id];
    if(m_limits.busy_edge_limit && c > *m_limits.busy_edge_limit)
        return EdgeDecision::SkipWithAssumption;
    return EdgeDecision::Proceed;
}

} // namespace cmc
