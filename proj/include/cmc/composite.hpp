#pragma once

#include <cmc/automaton.hpp>
#include <cmc/conditions.hpp>
#include <cmc/domains.hpp>

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cmc {

enum class DomainKind { Location, Explicit, Predicate };

const char* to_string(DomainKind kind);

using DomainState = std::variant<std::monostate, ExplicitState, PredicateState>;

// (e_A, e_L, condition states, observer state, e_D). Excluded iff e_A is false.
struct CompositeState {
    Formula assumption;
    LocationId location{};
    std::optional<RepeatState> repeat;
    std::optional<PathStatsState> path;
    std::optional<AutomatonStateId> observer;
    DomainState domain;

    bool excluded() const { return assumption.is_false(); }

    friend bool operator==(const CompositeState&, const CompositeState&) = default;
};

struct CompositeOptions {
    DomainKind domain = DomainKind::Predicate;
    std::optional<std::uint32_t> repeat_k;
    PathLimits path_limits;
    bool overflow = false;
    Value overflow_min = std::numeric_limits<std::int32_t>::min();
    Value overflow_max = std::numeric_limits<std::int32_t>::max();
    AbstractionOptions abstraction;
};

// (x >= MIN) & (x <= MAX) after an assignment to x, true otherwise.
Formula overflow_transfer(const Edge& g, Value min, Value max);

struct CompositeCounters {
    std::size_t abstraction_failures = 0;
    std::size_t explicit_overflows = 0;
    std::size_t pruned_by_observer = 0;
};

class CompositeCpa {
  public:
    using State = CompositeState;

    CompositeCpa(const Cfa& cfa, CompositeOptions options, Solver& solver, const Precision& precision,
                 const AutomatonObserver* observer = nullptr);

    State initial() const;

    std::vector<State> successors(const State& s, const Edge& g, bool skip);
    std::optional<State> merge(const State& fresh, const State& reached) const;
    bool stop(const State& fresh, const State& reached);

    LocationId location(const State& s) const { return s.location; }
    bool is_excluded(const State& s) const { return s.excluded(); }
    bool is_target(const State& s) const { return m_cfa.is_error(s.location); }
    std::string index_key(const State& s) const;
    std::vector<std::string> cover_keys(const State& s) const;

    // e_P as a formula over program variables.
    Formula domain_formula(const State& s) const;

    const CompositeOptions& options() const { return m_options; }
    const CompositeCounters& counters() const { return m_counters; }

  private:
    std::string key_prefix(const State& s) const;
    DomainState top() const;

    const Cfa& m_cfa;
    CompositeOptions m_options;
    Solver& m_solver;
    const Precision& m_precision;
    const AutomatonObserver* m_observer;
    CompositeCounters m_counters;
};

} // namespace cmc
