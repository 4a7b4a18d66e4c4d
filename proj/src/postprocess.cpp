#include <cmc/postprocess.hpp>

#include <algorithm>
#include <sstream>

namespace cmc {

std::vector<Clause> postprocess(const std::vector<ReachedEntry>& reached) {
    std::vector<Clause> out;
    for(const auto& e : reached) {
        Formula negated = !e.domain;
        Formula body = e.waitlist || e.error ? negated : (negated | e.assumption);
        if(!body.is_true())
            out.push_back({e.location, body});
    }
    std::sort(out.begin(), out.end(), [](const Clause& a, const Clause& b) {
        if(a.location != b.location)
            return raw(a.location) < raw(b.location);
        return a.body < b.body;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Formula pc_is(LocationId l) {
    return Formula::compare(Poly::var("pc"), ExprKind::Eq, Poly::value(raw(l)));
}

Formula psi_formula(const std::vector<Clause>& clauses) {
    std::vector<Formula> parts;
    for(const auto& c : clauses)
        parts.push_back(implies(pc_is(c.location), c.body));
    return conj(std::move(parts));
}

std::string psi_text(const std::vector<Clause>& clauses) {
    std::ostringstream out;
    out << "# psi\n";
    if(clauses.empty())
        out << "true\n";
    for(const auto& c : clauses)
        out << "(pc = " << raw(c.location) << ") -> (" << c.body.str() << ")\n";
    return out.str();
}

std::vector<Clause> parse_psi(std::string_view text) {
    std::vector<Clause> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while(std::getline(in, line)) {
        if(line.empty() || line.starts_with("#") || line == "true")
            continue;
        const std::string prefix = "(pc = ";
        std::size_t close = line.find(") -> (");
        if(!line.starts_with(prefix) || close == std::string::npos || !line.ends_with(")"))
            throw Error("malformed psi line: " + line);
        auto loc = static_cast<std::uint32_t>(std::stoul(line.substr(prefix.size(), close - prefix.size())));
        std::size_t body = close + 6;
        out.push_back({LocationId{loc}, parse_formula(line.substr(body, line.size() - 1 - body))});
    }
    return out;
}

} // namespace cmc
