#pragma once

#include <cmc/cfa.hpp>
#include <cmc/formula.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmc {

using AutomatonStateId = std::uint32_t;

enum class Sink { None, T, U };

struct AutomatonState {
    AutomatonStateId id = 0;
    bool initial = false;
    Sink sink = Sink::None;

    friend bool operator==(const AutomatonState&, const AutomatonState&) = default;
};

struct AutomatonTransition {
    AutomatonStateId source = 0;
    std::optional<EdgeId> edge; // nullopt matches every edge
    Formula assumption;
    AutomatonStateId target = 0;

    friend bool operator==(const AutomatonTransition&, const AutomatonTransition&) = default;
};

// Condition over CFA edges. T collects fully verified regions; U stands for
// everything the producing run did not verify.
class AssumptionAutomaton {
  public:
    std::size_t cfa_edges = 0;
    std::string cfa_hash;
    std::vector<AutomatonState> states; // dense ids, in id order
    std::vector<AutomatonTransition> transitions;

    AutomatonStateId initial() const;
    std::optional<AutomatonStateId> sink(Sink kind) const;
    bool is_sink(AutomatonStateId s, Sink kind) const { return states.at(s).sink == kind; }

    // Puts transitions in file order: by source, then edge id, wildcard last.
    void normalize();

    std::string serialize() const;
    static AssumptionAutomaton parse(std::string_view text);

    // Throws AutomatonMismatch when the file was produced for another CFA.
    void check_matches(const Cfa& cfa) const;

    friend bool operator==(const AssumptionAutomaton&, const AssumptionAutomaton&) = default;
};

// Runs an automaton alongside an analysis.
class AutomatonObserver {
  public:
    explicit AutomatonObserver(const AssumptionAutomaton& a);

    const AssumptionAutomaton& automaton() const { return *m_automaton; }
    AutomatonStateId initial() const { return m_automaton->initial(); }

    // The next automaton state, or nullopt when the edge leads into T and the
    // path is pruned. An edge without a matching transition, or a transition
    // whose assumption is not true, leads to U.
    std::optional<AutomatonStateId> step(AutomatonStateId s, const Edge& g) const;

  private:
    const AssumptionAutomaton* m_automaton;
    std::vector<std::map<std::uint32_t, std::size_t>> m_exact;
    std::vector<std::optional<std::size_t>> m_wildcard;
    std::optional<AutomatonStateId> m_u;
};

// The parts of a finished ART that export needs.
struct ArtSnapshot {
    enum class Status { Reached, Covered, Removed };
    struct Node {
        std::optional<std::size_t> parent;
        EdgeId via{};
        Formula label; // assumption on the edge from the parent
        Status status = Status::Reached;
        std::optional<std::size_t> covered_by;
        bool excluded = false;
        bool waitlist = false;
        bool error = false;
    };
    std::vector<Node> nodes; // node 0 is the root
};

AssumptionAutomaton export_automaton(const ArtSnapshot& art, const Cfa& cfa);

} // namespace cmc
