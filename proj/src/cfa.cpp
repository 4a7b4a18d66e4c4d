#include <cmc/cfa.hpp>

#include <cstdio>

namespace cmc {

std::string op_str(const Operation& op) {
    struct {
        std::string operator()(const Assign& a) const { return a.var + " := " + a.term.str(); }
        std::string operator()(const Assume& a) const { return "assume " + a.condition.str(); }
        std::string operator()(const Havoc& h) const { return "havoc " + h.var; }
    } visitor;
    return std::visit(visitor, op);
}

bool is_assume(const Operation& op) { return std::holds_alternative<Assume>(op); }

Cfa::Cfa(std::set<LocationId> locations,
         LocationId initial,
         std::set<LocationId> error_locations,
         std::vector<Edge> edges,
         std::vector<std::string> variables)
    : m_locations(std::move(locations)),
      m_initial(initial),
      m_errors(std::move(error_locations)),
      m_edges(std::move(edges)),
      m_variables(std::move(variables)) {
    auto loc_name = [](LocationId l) { return "L" + std::to_string(raw(l)); };
    if(!m_locations.count(m_initial))
        throw InvalidCfa("initial location " + loc_name(m_initial) + " is not declared");
    for(LocationId e : m_errors)
        if(!m_locations.count(e))
            throw InvalidCfa("error location " + loc_name(e) + " is not declared");
    std::set<std::string> declared(m_variables.begin(), m_variables.end());
    if(declared.size() != m_variables.size())
        throw InvalidCfa("duplicate variable declaration");
    for(std::size_t i = 0; i < m_edges.size(); ++i) {
        Edge& g = m_edges[i];
        g.id = EdgeId{static_cast<std::uint32_t>(i)};
        if(!m_locations.count(g.source) || !m_locations.count(g.target))
            throw InvalidCfa("edge " + loc_name(g.source) + " -> " + loc_name(g.target) +
                             " references an undeclared location");
        std::set<std::string> used;
        std::visit(
            [&](const auto& op) {
                using T = std::decay_t<decltype(op)>;
                if constexpr(std::is_same_v<T, Assign>) {
                    used.insert(op.var);
                    if(op.term.is_boolean())
                        throw InvalidCfa("assignment of a condition to " + op.var);
                    collect_variables(op.term, used);
                } else if constexpr(std::is_same_v<T, Assume>) {
                    if(!op.condition.is_boolean())
                        throw InvalidCfa("assume over a non-boolean expression");
                    collect_variables(op.condition, used);
                } else {
                    used.insert(op.var);
                }
            },
            g.op);
        for(const auto& v : used)
            if(!declared.count(v))
                throw InvalidCfa("undeclared variable " + v);
        m_outgoing[g.source].push_back(g.id);
    }
}

std::span<const EdgeId> Cfa::outgoing(LocationId l) const {
    auto it = m_outgoing.find(l);
    if(it == m_outgoing.end())
        return {};
    return it->second;
}

std::string Cfa::fingerprint() const {
    // FNV-1a over the printed edges
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
        for(unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for(const Edge& g : m_edges)
        mix(std::to_string(raw(g.source)) + ">" + std::to_string(raw(g.target)) + ":" + op_str(g.op) +
            ";");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace cmc
