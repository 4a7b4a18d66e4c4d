#pragma once

// Ground truth for tests: a concrete interpreter written independently of the
// analyses, bounded brute-force reachability and brute-force abstraction.

#include <cmc/cfa.hpp>
#include <cmc/formula.hpp>

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cmc::oracle {

struct ConcreteState {
    LocationId pc{};
    std::map<std::string, Value> store;

    friend auto operator<=>(const ConcreteState&, const ConcreteState&) = default;
};

ConcreteState initial_state(const Cfa& cfa);

// Exact semantics of Assign and Assume; Havoc must be expanded by the caller.
std::optional<ConcreteState> step(const ConcreteState& c, const Edge& g);

Value eval(const Expr& term, const std::map<std::string, Value>& store);
bool holds(const Expr& condition, const std::map<std::string, Value>& store);

enum class EnumStatus { Complete, DepthBounded, BudgetExceeded };

struct EnumOptions {
    Value lo = 0;
    Value hi = 4;
    std::size_t max_states = 10000;
    std::optional<std::size_t> max_depth;
    bool depth_first = false;
    // States rejected by the filter are neither counted nor expanded.
    std::function<bool(const ConcreteState&)> filter;
};

struct TraceStep {
    EdgeId edge;
    ConcreteState state;
};

struct ReachResult {
    EnumStatus status = EnumStatus::Complete;
    std::set<ConcreteState> visited;
    bool error_hit = false;
    std::vector<TraceStep> witness; // path to the first error state found
};

ReachResult enumerate_reachable(const Cfa& cfa, const EnumOptions& options = {});

// Replays a trace from the initial store; havoc values are read from the
// recorded stores. True iff every step matches and the last state is at an
// error location.
bool replays_to_error(const Cfa& cfa, const std::vector<TraceStep>& trace);

// Formula value with products evaluated concretely.
bool evaluate(const Formula& f, const std::map<std::string, Value>& values);

// Assignments to `variables` over [-box, box] satisfying f.
std::vector<std::map<std::string, Value>> box_models(const Formula& f,
                                                     const std::vector<std::string>& variables,
                                                     Value box);

// Disjunction of minterms over `pi` that have a model of sp in the box.
Formula brute_force_boolean_abstraction(const Formula& sp, const std::vector<Atom>& pi,
                                        Value box = 8);

// psi as seen by a concrete state: the pc variable is bound to the location.
bool satisfies(const Formula& psi, const ConcreteState& c);

} // namespace cmc::oracle
