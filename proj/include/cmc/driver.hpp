#pragma once

#include <cmc/automaton.hpp>
#include <cmc/composite.hpp>
#include <cmc/postprocess.hpp>
#include <cmc/reachability.hpp>
#include <cmc/refine.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmc {

enum class Verdict { True, False, Condition };

const char* to_string(Verdict v);

// Exit status of the command-line tool for a verdict.
int exit_code(Verdict v);

struct AnalysisConfig {
    std::string name = "predicate";
    DomainKind domain = DomainKind::Predicate;
    WaitlistOrder order = WaitlistOrder::Bfs;
    std::optional<std::uint32_t> repeat_k;
    PathLimits path_limits;
    MonitorLimits limits;
    bool refinement = true;
    bool overflow = false;
    bool restart_on_refine = false;
    SolverOptions solver;
    AbstractionOptions abstraction;
    std::optional<std::filesystem::path> input_automaton;

    // Throws Error when refinement is requested for a non-predicate domain.
    void validate() const;
};

// Shipped configurations: predicate, explicit, location.
AnalysisConfig named_config(std::string_view name);

// Applies one `key=value` condition or budget to the configuration.
void apply_condition(AnalysisConfig& config, std::string_view spec);

struct RunStats {
    std::size_t iterations = 0;
    std::size_t posts = 0;
    std::size_t merges = 0;
    std::size_t covered = 0;
    std::size_t reached = 0;
    std::size_t waitlist = 0;
    std::size_t art_nodes = 0;
    std::size_t refinements = 0;
    std::size_t exclusions = 0;
    std::size_t precision = 0;
    std::size_t abstraction_failures = 0;
    std::size_t solver_queries = 0;
    bool halted = false;
    double seconds = 0;
};

struct AnalysisReport {
    std::string config;
    Verdict verdict = Verdict::Condition;
    std::vector<Clause> psi;
    AssumptionAutomaton automaton;
    std::vector<ConcreteStep> witness;
    Precision precision;
    RunStats stats;
    // (location, domain) of every reached state, in node order
    std::vector<std::pair<LocationId, std::string>> reached;
    // the final abstract reachability tree
    ArtSnapshot art;
};

// One analysis with refinement, post-processing and automaton export.
AnalysisReport run_analysis(const Cfa& cfa, const AnalysisConfig& config,
                            const AssumptionAutomaton* input = nullptr);

enum class Chaining { Independent, ConditionPassing };

struct Pipeline {
    std::vector<AnalysisConfig> stages;
    Chaining chaining = Chaining::ConditionPassing;
};

// JSON: {"chaining": "condition-passing"|"independent", "stages": [{"config":
// NAME, "conditions": ["k=v", ...], "order": "dfs"|"bfs", "refinement": bool,
// "overflow": bool}]}. Unknown keys are rejected.
Pipeline parse_pipeline(std::string_view json_text);

struct StageReport {
    std::string config;
    std::optional<AnalysisReport> report; // nullopt: skipped
};

struct FinalReport {
    std::vector<StageReport> stages;
    Verdict verdict = Verdict::Condition;
    std::size_t final_stage = 0; // index of the stage whose result counts
    double total_seconds = 0;

    const AnalysisReport& result() const { return *stages.at(final_stage).report; }
    bool solved() const { return verdict != Verdict::Condition; }
};

// Stages run in order and stop at the first TRUE or FALSE. In
// condition-passing mode each stage reads the previous stage's automaton.
FinalReport run_pipeline(const Cfa& cfa, const Pipeline& pipeline,
                         const AssumptionAutomaton* input = nullptr);

enum class StatsFormat { Text, JsonLines };

// verdict.txt, psi.txt, automaton.txt, witness.txt (FALSE only) and
// stats.txt or stats.jsonl. Throws Error naming the path on I/O failure.
void emit_report(const Cfa& cfa, const FinalReport& report, const std::filesystem::path& dir,
                 StatsFormat format);

std::string stats_text(const FinalReport& report);
std::string stats_json_lines(const FinalReport& report);

} // namespace cmc
