#pragma once

#include <cmc/cfa.hpp>
#include <cmc/formula.hpp>
#include <cmc/solver.hpp>

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cmc {

struct ConcreteStep {
    EdgeId edge{};
    LocationId location{};
    std::map<std::string, Value> store; // after the edge
};

enum class Feasibility { Feasible, Infeasible, Unconfirmed };

const char* to_string(Feasibility f);

// Path positions count states: state 0 is the root, state k follows edge k-1.
struct FeasibilityResult {
    Feasibility kind = Feasibility::Unconfirmed;
    std::size_t pivot = 0; // first state whose prefix formula is Unsat
    std::vector<ConcreteStep> witness;
};

// The path starts in the all-zero store over `cfa`'s variables. A Sat full
// formula is only Feasible if concrete replay with the model's havoc values
// reaches the end; anything short of that is Unconfirmed with pivot = length.
FeasibilityResult check_feasibility(const Cfa& cfa, std::span<const Edge> path, Solver& solver);

// Atoms of the path's assumptions and their substitutions backward through
// linear assignments. Substitution stops at a havoc of a mentioned variable,
// a nonlinear term or a constant result. `origin` is the index of the last
// assume edge the atom was derived from.
struct MinedAtom {
    Atom atom;
    std::size_t origin = 0;
};

std::vector<MinedAtom> mine_atoms(std::span<const Edge> path);

// Each mined atom at the locations of states 0..min(pivot, origin + 1):
// from the root up to the state right after its assume edge.
std::vector<std::pair<LocationId, Atom>> mine_predicates(std::span<const Edge> path,
                                                         std::span<const LocationId> locations,
                                                         std::size_t pivot);

// One line per step: `step k: edge <id> <op>; store {v=val,...}`.
std::string witness_text(const Cfa& cfa, const std::vector<ConcreteStep>& witness);

} // namespace cmc
