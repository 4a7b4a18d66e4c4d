#include <cmc/automaton.hpp>

#include <algorithm>
#include <map>
#include <sstream>

namespace cmc {

AutomatonStateId AssumptionAutomaton::initial() const {
    for(const auto& s : states)
        if(s.initial)
            return s.id;
    throw Error("automaton has no initial state");
}

std::optional<AutomatonStateId> AssumptionAutomaton::sink(Sink kind) const {
    for(const auto& s : states)
        if(s.sink == kind)
            return s.id;
    return std::nullopt;
}

void AssumptionAutomaton::normalize() {
    std::stable_sort(transitions.begin(), transitions.end(),
                     [](const AutomatonTransition& a, const AutomatonTransition& b) {
                         if(a.source != b.source)
                             return a.source < b.source;
                         if(a.edge.has_value() != b.edge.has_value())
                             return a.edge.has_value();
                         return a.edge && raw(*a.edge) < raw(*b.edge);
                     });
}

std::string AssumptionAutomaton::serialize() const {
    std::ostringstream out;
    out << "# cfa edges=" << cfa_edges << " hash=" << cfa_hash << "\n";
    for(const auto& s : states) {
        out << "state " << s.id;
        if(s.initial)
            out << " init";
        if(s.sink == Sink::T)
            out << " T";
        if(s.sink == Sink::U)
            out << " U";
        out << ";\n";
    }
    for(const auto& t : transitions) {
        out << "trans " << t.source << " edge=";
        if(t.edge)
            out << raw(*t.edge);
        else
            out << "*";
        out << " assume=" << t.assumption.str() << " -> " << t.target << ";\n";
    }
    return out.str();
}

namespace {

[[noreturn]] void bad_line(int line, const std::string& what) {
    throw Error("automaton line " + std::to_string(line) + ": " + what);
}

std::uint32_t parse_id(std::string_view s, int line) {
    if(s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
        bad_line(line, "expected a number, got '" + std::string(s) + "'");
    return static_cast<std::uint32_t>(std::stoul(std::string(s)));
}

std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string w;
    while(in >> w)
        out.push_back(w);
    return out;
}

} // namespace

AssumptionAutomaton AssumptionAutomaton::parse(std::string_view text) {
    AssumptionAutomaton a;
    std::istringstream in{std::string(text)};
    std::string raw_line;
    int line = 0;
    while(std::getline(in, raw_line)) {
        ++line;
        std::string_view l = raw_line;
        if(l.starts_with("# cfa")) {
            for(const auto& w : words(l.substr(5))) {
                if(w.starts_with("edges="))
                    a.cfa_edges = parse_id(std::string_view(w).substr(6), line);
                else if(w.starts_with("hash="))
                    a.cfa_hash = w.substr(5);
            }
            continue;
        }
        if(l.empty() || l.starts_with("#"))
            continue;
        if(!l.ends_with(";"))
            bad_line(line, "missing ';'");
        l.remove_suffix(1);
        if(l.starts_with("state ")) {
            auto w = words(l.substr(6));
            if(w.empty())
                bad_line(line, "state without id");
            AutomatonState s;
            s.id = parse_id(w[0], line);
            if(s.id != a.states.size())
                bad_line(line, "state ids must be dense and ordered");
            for(std::size_t i = 1; i < w.size(); ++i) {
                if(w[i] == "init")
                    s.initial = true;
                else if(w[i] == "T")
                    s.sink = Sink::T;
                else if(w[i] == "U")
                    s.sink = Sink::U;
                else
                    bad_line(line, "unknown state flag '" + w[i] + "'");
            }
            a.states.push_back(s);
        } else if(l.starts_with("trans ")) {
            std::size_t arrow = l.rfind(" -> ");
            std::size_t assume = l.find(" assume=");
            if(arrow == std::string_view::npos || assume == std::string_view::npos || assume > arrow)
                bad_line(line, "malformed transition");
            auto head = words(l.substr(6, assume - 6));
            if(head.size() != 2 || !head[1].starts_with("edge="))
                bad_line(line, "malformed transition head");
            AutomatonTransition t;
            t.source = parse_id(head[0], line);
            std::string_view e = std::string_view(head[1]).substr(5);
            if(e != "*")
                t.edge = EdgeId{parse_id(e, line)};
            std::size_t f = assume + 8;
            try {
                t.assumption = parse_formula(l.substr(f, arrow - f));
            } catch(const SyntaxError& err) {
                bad_line(line, err.what());
            }
            auto tail = words(l.substr(arrow + 4));
            if(tail.size() != 1)
                bad_line(line, "malformed transition target");
            t.target = parse_id(tail[0], line);
            a.transitions.push_back(std::move(t));
        } else {
            bad_line(line, "unknown declaration");
        }
    }
    for(const auto& t : a.transitions)
        if(t.source >= a.states.size() || t.target >= a.states.size())
            throw Error("automaton transition refers to an undeclared state");
    if(std::count_if(a.states.begin(), a.states.end(), [](auto& s) { return s.initial; }) != 1)
        throw Error("automaton needs exactly one initial state");
    return a;
}

void AssumptionAutomaton::check_matches(const Cfa& cfa) const {
    if(cfa_edges != cfa.edges().size() || cfa_hash != cfa.fingerprint())
        throw AutomatonMismatch("automaton was produced for a different program (" +
                                std::to_string(cfa_edges) + " edges, hash " + cfa_hash +
                                "; program has " + std::to_string(cfa.edges().size()) +
                                " edges, hash " + cfa.fingerprint() + ")");
    for(const auto& t : transitions)
        if(t.edge && raw(*t.edge) >= cfa.edges().size())
            throw AutomatonMismatch("automaton refers to edge " + std::to_string(raw(*t.edge)) +
                                    " beyond the program's edges");
}

AutomatonObserver::AutomatonObserver(const AssumptionAutomaton& a)
    : m_automaton(&a), m_exact(a.states.size()), m_wildcard(a.states.size()), m_u(a.sink(Sink::U)) {
    for(std::size_t i = 0; i < a.transitions.size(); ++i) {
        const auto& t = a.transitions[i];
        if(t.edge)
            m_exact[t.source].emplace(raw(*t.edge), i);
        else if(!m_wildcard[t.source])
            m_wildcard[t.source] = i;
    }
}

std::optional<AutomatonStateId> AutomatonObserver::step(AutomatonStateId s, const Edge& g) const {
    const AssumptionAutomaton& a = *m_automaton;
    if(raw(g.id) >= a.cfa_edges)
        throw AutomatonMismatch("edge " + std::to_string(raw(g.id)) +
                                " is not in the automaton's program");
    if(a.is_sink(s, Sink::T))
        return std::nullopt;
    if(a.is_sink(s, Sink::U))
        return s;
    AutomatonStateId u = m_u.value_or(s);
    std::optional<std::size_t> match;
    if(auto it = m_exact[s].find(raw(g.id)); it != m_exact[s].end())
        match = it->second;
    else
        match = m_wildcard[s];
    if(!match)
        return u;
    const AutomatonTransition& t = a.transitions[*match];
    if(!t.assumption.is_true())
        return u;
    if(a.is_sink(t.target, Sink::T))
        return std::nullopt;
    return t.target;
}

AssumptionAutomaton export_automaton(const ArtSnapshot& art, const Cfa& cfa) {
    using Status = ArtSnapshot::Status;
    const auto& nodes = art.nodes;
    std::size_t n = nodes.size();
    AssumptionAutomaton a;
    a.cfa_edges = cfa.edges().size();
    a.cfa_hash = cfa.fingerprint();

    auto unsettled = [&](std::size_t i) {
        return nodes[i].excluded || nodes[i].waitlist || nodes[i].error;
    };
    std::vector<std::vector<std::size_t>> children(n);
    std::vector<std::vector<std::size_t>> covering(n);
    for(std::size_t i = 0; i < n; ++i) {
        if(nodes[i].status == Status::Removed)
            continue;
        if(nodes[i].parent)
            children[*nodes[i].parent].push_back(i);
        if(nodes[i].status == Status::Covered && nodes[i].covered_by)
            covering[*nodes[i].covered_by].push_back(i);
    }
    // Backward reachability from unverified nodes over tree and cover edges.
    std::vector<bool> retained(n, false);
    std::vector<std::size_t> work;
    auto mark = [&](std::size_t i) {
        if(!retained[i]) {
            retained[i] = true;
            work.push_back(i);
        }
    };
    for(std::size_t i = 0; i < n; ++i) {
        if(nodes[i].status == Status::Removed)
            continue;
        if(nodes[i].status == Status::Reached && unsettled(i))
            mark(i);
        if(nodes[i].parent && !nodes[i].label.is_true())
            mark(*nodes[i].parent);
    }
    while(!work.empty()) {
        std::size_t i = work.back();
        work.pop_back();
        if(nodes[i].parent)
            mark(*nodes[i].parent);
        for(std::size_t leaf : covering[i])
            mark(leaf);
    }

    if(n == 0 || !retained[0]) {
        a.states.push_back({0, true, Sink::T});
        a.transitions.push_back({0, std::nullopt, Formula::top(), 0});
        return a;
    }
    std::vector<std::optional<AutomatonStateId>> id(n);
    AutomatonStateId next = 0;
    for(std::size_t i = 0; i < n; ++i)
        if(retained[i] && nodes[i].status == Status::Reached) {
            id[i] = next;
            a.states.push_back({next, i == 0, Sink::None});
            ++next;
        }
    AutomatonStateId t_sink = next++;
    AutomatonStateId u_sink = next++;
    a.states.push_back({t_sink, false, Sink::T});
    a.states.push_back({u_sink, false, Sink::U});

    auto target_of = [&](std::size_t c) -> AutomatonStateId {
        if(nodes[c].status == Status::Covered) {
            std::size_t cov = *nodes[c].covered_by;
            return id[cov] ? *id[cov] : t_sink;
        }
        return id[c] ? *id[c] : t_sink;
    };
    for(std::size_t i = 0; i < n; ++i) {
        if(!id[i])
            continue;
        if(unsettled(i)) {
            a.transitions.push_back({*id[i], std::nullopt, Formula::top(), u_sink});
            continue;
        }
        // one transition per edge; disagreeing children send the edge to U
        std::map<std::uint32_t, AutomatonTransition> by_edge;
        for(std::size_t c : children[i]) {
            AutomatonTransition t{*id[i], nodes[c].via, nodes[c].label, target_of(c)};
            auto [it, fresh] = by_edge.emplace(raw(nodes[c].via), t);
            if(fresh || it->second == t)
                continue;
            it->second.assumption = it->second.assumption & t.assumption;
            it->second.target = u_sink;
        }
        for(auto& [e, t] : by_edge)
            a.transitions.push_back(std::move(t));
    }
    a.transitions.push_back({t_sink, std::nullopt, Formula::top(), t_sink});
    a.transitions.push_back({u_sink, std::nullopt, Formula::top(), u_sink});
    a.normalize();
    return a;
}

} // namespace cmc
