#pragma once

#include <cmc/cfa.hpp>
#include <cmc/formula.hpp>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace cmc {

std::string ssa_name(const std::string& var, int index);

// Strongest-postcondition encoding of an edge sequence over SSA names v@k.
struct PathFormula {
    std::vector<Formula> steps; // one constraint group per edge
    std::map<std::string, int> ssa;

    int index(const std::string& var) const;
    std::string current(const std::string& var) const { return ssa_name(var, index(var)); }

    void extend(const Edge& g);
    Formula formula() const { return conj(steps); }
    std::size_t atom_count() const;
};

PathFormula build_path_formula(std::span<const Edge> edges);

inline std::size_t atom_count(const PathFormula& pf) { return pf.atom_count(); }

// v@0 = 0 for every variable: the all-zero initial store.
Formula initial_store(const std::vector<std::string>& variables);

} // namespace cmc
