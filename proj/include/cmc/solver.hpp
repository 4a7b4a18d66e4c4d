#pragma once

#include <cmc/formula.hpp>

#include <map>
#include <string>
#include <unordered_map>

namespace cmc {

enum class SatResult { Unsat, Sat, MaybeSat };
enum class Entailment { Yes, Unknown };

const char* to_string(SatResult r);

struct SolverOptions {
    std::size_t clause_bound = 4096;
    // Witness search tries up to 2*witness_box+1 values per variable.
    Value witness_box = 32;
};

// Values for every monomial of the formula (opaque products included).
using Model = std::map<std::string, Value>;

struct SatOutcome {
    SatResult result = SatResult::MaybeSat;
    Model model;
};

// Throws FormulaTooLarge when the DNF exceeds the clause bound.
SatOutcome check_sat(const Formula& f, const SolverOptions& options = {});
SatResult is_satisfiable(const Formula& f, const SolverOptions& options = {});

// Yes iff f & !g is Unsat; FormulaTooLarge counts as Unknown.
Entailment entails(const Formula& f, const Formula& g, const SolverOptions& options = {});

// Memoizing front end used by the analyses.
class Solver {
  public:
    explicit Solver(SolverOptions options = {}) : m_options(options) {}

    SatResult is_satisfiable(const Formula& f);
    Entailment entails(const Formula& f, const Formula& g);

    const SolverOptions& options() const { return m_options; }
    std::size_t queries() const { return m_queries; }

  private:
    SolverOptions m_options;
    // nullopt marks a formula that exceeded the clause bound
    std::unordered_map<std::string, std::optional<SatResult>> m_cache;
    std::size_t m_queries = 0;
};

} // namespace cmc
