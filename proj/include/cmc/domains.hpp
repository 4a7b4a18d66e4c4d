#pragma once

#include <cmc/cfa.hpp>
#include <cmc/formula.hpp>
#include <cmc/solver.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cmc {

// Location analysis over L and a top element (nullopt).
std::vector<std::optional<LocationId>> location_transfer(std::optional<LocationId> s,
                                                         const Edge& g);

// Partial store; an absent variable is top.
struct ExplicitState {
    std::map<std::string, Value> values;

    friend auto operator<=>(const ExplicitState&, const ExplicitState&) = default;
};

// Empty or singleton. `overflowed` is set when an assignment lost its value
// to host overflow.
std::vector<ExplicitState> explicit_transfer(const ExplicitState& s, const Edge& g,
                                             bool* overflowed = nullptr);

// covering agrees with s on every variable covering defines.
bool explicit_covers(const ExplicitState& covering, const ExplicitState& s);
bool explicit_stop(const ExplicitState& s, const std::vector<ExplicitState>& reached);

// Conjunction of v = value over the defined variables.
Formula render(const ExplicitState& s);

std::string explicit_key(const ExplicitState& s);
// Keys of every state that could cover s: one per subset of its defined variables.
std::vector<std::string> explicit_cover_keys(const ExplicitState& s);

struct PredicateState {
    Formula abstraction;

    friend bool operator==(const PredicateState&, const PredicateState&) = default;
};

class AbstractionFailure : public Error {
  public:
    using Error::Error;
};

// Predicate sets per location plus a global set. Atoms are kept in text order.
class Precision {
  public:
    // True iff the atom was new.
    bool add(LocationId l, const Atom& a);
    bool add_global(const Atom& a);

    std::vector<Atom> at(LocationId l) const;
    std::size_t size() const;

    // `loc L5: x >= 1000000;` and `global: y <= 0;`, one atom per line.
    std::string dump() const;
    static Precision load(std::string_view text);

    friend bool operator==(const Precision&, const Precision&) = default;

  private:
    std::map<LocationId, std::map<std::string, Atom>> m_local;
    std::map<std::string, Atom> m_global;
};

struct AbstractionOptions {
    // Exact minterm enumeration up to this many predicates, Cartesian beyond.
    std::size_t minterm_bound = 8;
};

// Boolean abstraction of sp over `preds` (formulas over the names sp uses);
// `out` gives the same predicates in the names of the result. nullopt when
// no minterm survives. Throws AbstractionFailure on FormulaTooLarge.
std::optional<Formula> abstract_formula(const Formula& sp, const std::vector<Formula>& preds,
                                        const std::vector<Formula>& out, Solver& solver,
                                        const AbstractionOptions& options = {});

// The strongest-postcondition formula of s along g, over SSA names, and the
// renaming from program variables to their post-state SSA names.
struct StrongestPost {
    Formula formula;
    Rename post;
};
StrongestPost strongest_post(const PredicateState& s, const Edge& g);

std::vector<PredicateState> predicate_transfer(const PredicateState& s, const Edge& g,
                                               const Precision& precision, Solver& solver,
                                               const AbstractionOptions& options = {});

bool predicate_stop(const PredicateState& s, const std::vector<PredicateState>& reached,
                    Solver& solver);

// Two-level minimization of a boolean function over n <= 16 inputs, given by
// its true minterms. Each implicant is (values, care mask).
std::vector<std::pair<unsigned, unsigned>> minimize_minterms(const std::vector<unsigned>& minterms,
                                                             unsigned n);

} // namespace cmc
