#pragma once

#include <cmc/expr.hpp>
#include <cmc/types.hpp>

#include <map>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cmc {

struct Assign {
    std::string var;
    Expr term;
};

struct Assume {
    Expr condition;
};

struct Havoc {
    std::string var;
};

using Operation = std::variant<Assign, Assume, Havoc>;

std::string op_str(const Operation& op);
bool is_assume(const Operation& op);

struct Edge {
    EdgeId id;
    LocationId source;
    LocationId target;
    Operation op;
};

class Cfa {
  public:
    Cfa() = default;

    // Validates the invariants and builds the adjacency index. Edge ids are
    // reassigned to their position in `edges`.
    Cfa(std::set<LocationId> locations,
        LocationId initial,
        std::set<LocationId> error_locations,
        std::vector<Edge> edges,
        std::vector<std::string> variables);

    const std::set<LocationId>& locations() const { return m_locations; }
    LocationId initial() const { return m_initial; }
    const std::set<LocationId>& error_locations() const { return m_errors; }
    bool is_error(LocationId l) const { return m_errors.count(l) != 0; }
    const std::vector<Edge>& edges() const { return m_edges; }
    const Edge& edge(EdgeId id) const { return m_edges.at(raw(id)); }
    const std::vector<std::string>& variables() const { return m_variables; }

    std::span<const EdgeId> outgoing(LocationId l) const;

    // Stable fingerprint of the edge list, used to detect stale automaton files.
    std::string fingerprint() const;

  private:
    std::set<LocationId> m_locations;
    LocationId m_initial{};
    std::set<LocationId> m_errors;
    std::vector<Edge> m_edges;
    std::vector<std::string> m_variables;
    std::map<LocationId, std::vector<EdgeId>> m_outgoing;
};

} // namespace cmc
