#include <cmc/driver.hpp>
#include <cmc/path_formula.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace cmc {

const char* to_string(Verdict v) {
    switch(v) {
    case Verdict::True: return "TRUE";
    case Verdict::False: return "FALSE";
    case Verdict::Condition: return "CONDITION";
    }
    return "?";
}

int exit_code(Verdict v) {
    switch(v) {
    case Verdict::True: return 0;
    case Verdict::False: return 1;
    case Verdict::Condition: return 2;
    }
    return 3;
}

void AnalysisConfig::validate() const {
    if(refinement && domain != DomainKind::Predicate)
        throw Error("configuration '" + name + "': refinement requires the predicate domain");
}

AnalysisConfig named_config(std::string_view name) {
    AnalysisConfig c;
    c.name = std::string(name);
    if(name == "predicate") {
        c.domain = DomainKind::Predicate;
        c.order = WaitlistOrder::Bfs;
        c.refinement = true;
    } else if(name == "explicit") {
        c.domain = DomainKind::Explicit;
        c.order = WaitlistOrder::Dfs;
        c.refinement = false;
    } else if(name == "location") {
        c.domain = DomainKind::Location;
        c.order = WaitlistOrder::Dfs;
        c.refinement = false;
    } else {
        throw Error("unknown configuration '" + std::string(name) +
                    "' (expected predicate, explicit or location)");
    }
    return c;
}

namespace {

std::uint64_t parse_count(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if(ec != std::errc{} || end != text.data() + text.size())
        throw Error("condition " + std::string(key) + ": expected a non-negative integer, got '" +
                    std::string(text) + "'");
    return v;
}

std::uint32_t parse_small(std::string_view key, std::string_view text) {
    std::uint64_t v = parse_count(key, text);
    if(v > std::numeric_limits<std::uint32_t>::max())
        throw Error("condition " + std::string(key) + ": value too large");
    return static_cast<std::uint32_t>(v);
}

} // namespace

void apply_condition(AnalysisConfig& config, std::string_view spec) {
    std::size_t eq = spec.find('=');
    if(eq == std::string_view::npos)
        throw Error("condition '" + std::string(spec) + "' is not of the form key=value");
    std::string_view key = spec.substr(0, eq);
    std::string_view value = spec.substr(eq + 1);
    if(key == "path-length")
        config.path_limits.path_length = parse_small(key, value);
    else if(key == "assume-edges")
        config.path_limits.assume_edges = parse_small(key, value);
    else if(key == "repeat-loc")
        config.repeat_k = parse_small(key, value);
    else if(key == "busy-edge")
        config.limits.busy_edge_limit = parse_count(key, value);
    else if(key == "reached-size")
        config.limits.max_reached = parse_count(key, value);
    else if(key == "fuel")
        config.limits.max_fuel = parse_count(key, value);
    else if(key == "pf-atoms")
        config.limits.path_formula_atom_limit = parse_count(key, value);
    else if(key == "soft-time") {
        if(value.ends_with("s"))
            value.remove_suffix(1);
        config.limits.soft_time_seconds = static_cast<double>(parse_count(key, value));
    } else
        throw Error("unknown condition '" + std::string(key) + "'");
}

namespace {

using Engine = Reachability<CompositeCpa>;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if(!in)
        throw Error("cannot read " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if(!out)
        throw Error("cannot write " + path.string());
    out << text;
    if(!out.flush())
        throw Error("cannot write " + path.string());
}

class Analysis {
  public:
    Analysis(const Cfa& cfa, const AnalysisConfig& config, const AutomatonObserver* observer)
        : m_cfa(cfa),
          m_config(config),
          m_solver(config.solver),
          m_cpa(cfa, composite_options(config), m_solver, m_precision, observer),
          m_monitor(config.limits),
          m_engine(cfa, m_cpa, config.order, &m_monitor) {
        m_engine.add_root(m_cpa.initial());
    }

    AnalysisReport run() {
        auto start = std::chrono::steady_clock::now();
        bool bug = false;
        bool halted = false;
        while(!bug) {
            RunStatus status = m_engine.run();
            bool handled = false;
            while(!bug) {
                std::optional<NodeId> t = m_engine.take_target();
                if(!t)
                    break;
                handled = true;
                bug = handle_target(*t);
            }
            if(status == RunStatus::Halted) {
                halted = true;
                break;
            }
            if(!handled && status == RunStatus::Finished)
                break;
        }
        AnalysisReport r = report(bug);
        r.stats.halted = halted;
        r.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return r;
    }

  private:
    static CompositeOptions composite_options(const AnalysisConfig& c) {
        CompositeOptions o;
        o.domain = c.domain;
        o.repeat_k = c.repeat_k;
        o.path_limits = c.path_limits;
        o.overflow = c.overflow;
        o.abstraction = c.abstraction;
        return o;
    }

    void exclude_from(const std::vector<NodeId>& nodes, std::size_t from) {
        for(std::size_t k = from; k < nodes.size(); ++k) {
            CompositeState s = m_engine.node(nodes[k]).state;
            if(s.excluded())
                continue;
            s.assumption = Formula::bottom();
            m_engine.exclude(nodes[k], std::move(s));
            ++m_exclusions;
        }
    }

    bool too_long(const std::vector<Edge>& edges) const {
        if(!m_config.limits.path_formula_atom_limit)
            return false;
        try {
            return build_path_formula(edges).atom_count() > *m_config.limits.path_formula_atom_limit;
        } catch(const ArithmeticOverflow&) {
            return true;
        }
    }

    // True when the target is a confirmed bug.
    bool handle_target(NodeId target) {
        std::vector<NodeId> nodes = m_engine.path_to(target);
        std::vector<Edge> edges = m_engine.edges_to(target);
        std::size_t n = edges.size();
        if(too_long(edges)) {
            exclude_from(nodes, n);
            return false;
        }
        FeasibilityResult r = check_feasibility(m_cfa, edges, m_solver);
        if(r.kind == Feasibility::Feasible) {
            m_witness = std::move(r.witness);
            return true;
        }
        std::size_t pivot = r.kind == Feasibility::Infeasible ? r.pivot : n;
        if(!m_config.refinement) {
            exclude_from(nodes, pivot);
            return false;
        }
        std::vector<LocationId> locations;
        for(NodeId id : nodes)
            locations.push_back(m_engine.node(id).state.location);
        std::set<LocationId> grown;
        for(const auto& [l, atom] : mine_predicates(edges, locations, pivot))
            if(m_precision.add(l, atom))
                grown.insert(l);
        std::string signature;
        for(const Edge& g : edges)
            signature += std::to_string(raw(g.id)) + ",";
        std::optional<std::size_t> cut;
        for(std::size_t k = 1; k <= n && !cut; ++k)
            if(grown.contains(locations[k]))
                cut = k;
        if(!cut || m_refined.contains(signature)) {
            exclude_from(nodes, pivot);
            return false;
        }
        m_refined.insert(signature);
        ++m_refinements;
        if(m_config.restart_on_refine) {
            for(NodeId c : std::vector<NodeId>(m_engine.node(0).children))
                m_engine.remove_subtree(c);
            m_engine.enqueue(0);
        } else {
            m_engine.remove_subtree(nodes[*cut]);
            m_engine.enqueue(nodes[*cut - 1]);
        }
        return false;
    }

    AnalysisReport report(bool bug) {
        AnalysisReport r;
        r.config = m_config.name;
        std::vector<ReachedEntry> entries;
        bool error_reached = false;
        bool all_true = true;
        for(NodeId id : m_engine.reached()) {
            const CompositeState& s = m_engine.node(id).state;
            bool error = m_cpa.is_target(s);
            Formula domain = m_cpa.domain_formula(s);
            entries.push_back({s.location, domain, s.assumption, m_engine.in_waitlist(id), error});
            error_reached = error_reached || error;
            all_true = all_true && s.assumption.is_true();
            r.reached.emplace_back(s.location, domain.str());
        }
        r.psi = postprocess(entries);
        if(bug)
            r.verdict = Verdict::False;
        else if(m_engine.waitlist_size() == 0 && !error_reached && all_true)
            r.verdict = Verdict::True;
        else
            r.verdict = Verdict::Condition;
        r.art = snapshot();
        r.automaton = export_automaton(r.art, m_cfa);
        r.witness = m_witness;
        r.precision = m_precision;

        const EngineStats& es = m_engine.stats();
        r.stats.iterations = es.iterations;
        r.stats.posts = es.posts;
        r.stats.merges = es.merges;
        r.stats.covered = es.covered;
        r.stats.reached = m_engine.reached_size();
        r.stats.waitlist = m_engine.waitlist_size();
        r.stats.art_nodes = m_engine.nodes().size();
        r.stats.refinements = m_refinements;
        r.stats.exclusions = m_exclusions;
        r.stats.precision = m_precision.size();
        r.stats.abstraction_failures = m_cpa.counters().abstraction_failures;
        r.stats.solver_queries = m_solver.queries();
        return r;
    }

    ArtSnapshot snapshot() const {
        ArtSnapshot art;
        const auto& nodes = m_engine.nodes();
        for(NodeId id = 0; id < nodes.size(); ++id) {
            const auto& n = nodes[id];
            ArtSnapshot::Node a;
            a.parent = n.parent;
            a.via = n.via;
            a.label = n.state.assumption;
            a.covered_by = n.covered_by;
            switch(n.status) {
            case NodeStatus::Reached: a.status = ArtSnapshot::Status::Reached; break;
            case NodeStatus::Covered: a.status = ArtSnapshot::Status::Covered; break;
            case NodeStatus::Removed: a.status = ArtSnapshot::Status::Removed; break;
            }
            a.excluded = n.state.excluded();
            a.waitlist = m_engine.in_waitlist(id);
            a.error = m_cpa.is_target(n.state);
            art.nodes.push_back(std::move(a));
        }
        return art;
    }

    const Cfa& m_cfa;
    const AnalysisConfig& m_config;
    Solver m_solver;
    Precision m_precision;
    CompositeCpa m_cpa;
    GlobalMonitor m_monitor;
    Engine m_engine;
    std::set<std::string> m_refined;
    std::vector<ConcreteStep> m_witness;
    std::size_t m_refinements = 0;
    std::size_t m_exclusions = 0;
};

} // namespace

AnalysisReport run_analysis(const Cfa& cfa, const AnalysisConfig& config, const AssumptionAutomaton* input) {
    config.validate();
    std::optional<AssumptionAutomaton> loaded;
    if(config.input_automaton) {
        loaded = AssumptionAutomaton::parse(read_file(*config.input_automaton));
        try {
            loaded->check_matches(cfa);
        } catch(const AutomatonMismatch& e) {
            throw AutomatonMismatch(config.input_automaton->string() + ": " + e.what());
        }
        input = &*loaded;
    } else if(input) {
        input->check_matches(cfa);
    }
    std::optional<AutomatonObserver> observer;
    if(input)
        observer.emplace(*input);
    Analysis analysis(cfa, config, observer ? &*observer : nullptr);
    return analysis.run();
}

Pipeline parse_pipeline(std::string_view json_text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch(const json::parse_error& e) {
        throw Error(std::string("pipeline: ") + e.what());
    }
    auto check_keys = [](const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
        if(!obj.is_object())
            throw Error("pipeline: " + where + " must be an object");
        for(const auto& [k, v] : obj.items())
            if(std::find(allowed.begin(), allowed.end(), k) == allowed.end())
                throw Error("pipeline: unknown key '" + k + "' in " + where);
    };
    check_keys(doc, {"chaining", "stages"}, "pipeline");
    Pipeline p;
    if(doc.contains("chaining")) {
        std::string mode = doc.at("chaining").get<std::string>();
        if(mode == "condition-passing")
            p.chaining = Chaining::ConditionPassing;
        else if(mode == "independent")
            p.chaining = Chaining::Independent;
        else
            throw Error("pipeline: unknown chaining '" + mode + "'");
    }
    if(!doc.contains("stages") || !doc.at("stages").is_array() || doc.at("stages").empty())
        throw Error("pipeline: 'stages' must be a non-empty array");
    try {
        for(const json& s : doc.at("stages")) {
            check_keys(s, {"config", "conditions", "order", "refinement", "overflow"}, "stage");
            AnalysisConfig c = named_config(s.value("config", std::string("predicate")));
            for(const auto& cond : s.value("conditions", std::vector<std::string>{}))
                apply_condition(c, cond);
            if(s.contains("order")) {
                std::string order = s.at("order").get<std::string>();
                if(order != "dfs" && order != "bfs")
                    throw Error("pipeline: order must be dfs or bfs");
                c.order = order == "dfs" ? WaitlistOrder::Dfs : WaitlistOrder::Bfs;
            }
            c.refinement = s.value("refinement", c.refinement);
            c.overflow = s.value("overflow", c.overflow);
            c.validate();
            p.stages.push_back(std::move(c));
        }
    } catch(const json::exception& e) {
        throw Error(std::string("pipeline: ") + e.what());
    }
    return p;
}

FinalReport run_pipeline(const Cfa& cfa, const Pipeline& pipeline, const AssumptionAutomaton* input) {
    FinalReport out;
    std::optional<AssumptionAutomaton> passed;
    const AssumptionAutomaton* current = input;
    bool done = false;
    for(std::size_t i = 0; i < pipeline.stages.size(); ++i) {
        const AnalysisConfig& stage = pipeline.stages[i];
        if(done) {
            out.stages.push_back({stage.name, std::nullopt});
            continue;
        }
        AnalysisReport r = run_analysis(cfa, stage, current);
        out.total_seconds += r.stats.seconds;
        out.verdict = r.verdict;
        out.final_stage = i;
        done = r.verdict != Verdict::Condition;
        if(pipeline.chaining == Chaining::ConditionPassing && !done) {
            passed = r.automaton;
            current = &*passed;
        } else if(pipeline.chaining == Chaining::Independent) {
            current = input;
        }
        out.stages.push_back({stage.name, std::move(r)});
    }
    return out;
}

std::string stats_text(const FinalReport& report) {
    std::ostringstream out;
    for(std::size_t i = 0; i < report.stages.size(); ++i) {
        const StageReport& s = report.stages[i];
        out << "stage " << i << " " << s.config << ": ";
        if(!s.report) {
            out << "skipped\n";
            continue;
        }
        const RunStats& st = s.report->stats;
        out << to_string(s.report->verdict) << "\n"
            << "  posts " << st.posts << "\n"
            << "  iterations " << st.iterations << "\n"
            << "  reached " << st.reached << "\n"
            << "  waitlist " << st.waitlist << "\n"
            << "  art-nodes " << st.art_nodes << "\n"
            << "  merges " << st.merges << "\n"
            << "  covered " << st.covered << "\n"
            << "  refinements " << st.refinements << "\n"
            << "  exclusions " << st.exclusions << "\n"
            << "  precision " << st.precision << "\n"
            << "  abstraction-failures " << st.abstraction_failures << "\n"
            << "  solver-queries " << st.solver_queries << "\n"
            << "  halted " << (st.halted ? "yes" : "no") << "\n"
            << "  seconds " << st.seconds << "\n";
    }
    out << "verdict " << to_string(report.verdict) << "\n"
        << "solved " << (report.solved() ? "yes" : "no") << "\n"
        << "total-seconds " << report.total_seconds << "\n";
    return out.str();
}

std::string stats_json_lines(const FinalReport& report) {
    using nlohmann::json;
    std::ostringstream out;
    for(std::size_t i = 0; i < report.stages.size(); ++i) {
        const StageReport& s = report.stages[i];
        json j{{"schema", 1}, {"stage", i}, {"config", s.config}};
        if(!s.report) {
            j["verdict"] = "skipped";
        } else {
            const RunStats& st = s.report->stats;
            j["verdict"] = to_string(s.report->verdict);
            j["posts"] = st.posts;
            j["iterations"] = st.iterations;
            j["reached"] = st.reached;
            j["waitlist"] = st.waitlist;
            j["art_nodes"] = st.art_nodes;
            j["merges"] = st.merges;
            j["covered"] = st.covered;
            j["refinements"] = st.refinements;
            j["exclusions"] = st.exclusions;
            j["precision"] = st.precision;
            j["abstraction_failures"] = st.abstraction_failures;
            j["solver_queries"] = st.solver_queries;
            j["halted"] = st.halted;
            j["seconds"] = st.seconds;
        }
        out << j.dump() << "\n";
    }
    json summary{{"schema", 1},
                 {"verdict", to_string(report.verdict)},
                 {"solved", report.solved()},
                 {"final_stage", report.final_stage},
                 {"total_seconds", report.total_seconds}};
    out << summary.dump() << "\n";
    return out.str();
}

void emit_report(const Cfa& cfa, const FinalReport& report, const std::filesystem::path& dir,
                 StatsFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if(ec)
        throw Error("cannot create " + dir.string() + ": " + ec.message());
    const AnalysisReport& r = report.result();
    write_file(dir / "verdict.txt", std::string(to_string(report.verdict)) + "\n");
    write_file(dir / "psi.txt", psi_text(r.psi));
    write_file(dir / "automaton.txt", r.automaton.serialize());
    std::filesystem::remove(dir / "witness.txt", ec);
    if(report.verdict == Verdict::False)
        write_file(dir / "witness.txt", witness_text(cfa, r.witness));
    if(format == StatsFormat::JsonLines)
        write_file(dir / "stats.jsonl", stats_json_lines(report));
    else
        write_file(dir / "stats.txt", stats_text(report));
}

} // namespace cmc
