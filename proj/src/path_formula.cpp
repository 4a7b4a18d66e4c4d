#include <cmc/path_formula.hpp>

namespace cmc {

std::string ssa_name(const std::string& var, int index) { return var + "@" + std::to_string(index); }

int PathFormula::index(const std::string& var) const {
    auto it = ssa.find(var);
    return it == ssa.end() ? 0 : it->second;
}

void PathFormula::extend(const Edge& g) {
    Rename now = [this](const std::string& v) { return current(v); };
    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr(std::is_same_v<T, Assign>) {
                Poly rhs = to_poly(op.term, now);
                int k = index(op.var) + 1;
                ssa[op.var] = k;
                steps.push_back(
                    Formula::compare(Poly::var(ssa_name(op.var, k)), ExprKind::Eq, rhs));
            } else if constexpr(std::is_same_v<T, Assume>) {
                steps.push_back(to_formula(op.condition, now));
            } else {
                ssa[op.var] = index(op.var) + 1;
                steps.push_back(Formula::top());
            }
        },
        g.op);
}

std::size_t PathFormula::atom_count() const {
    std::size_t n = 0;
    for(const auto& s : steps)
        n += s.atom_count();
    return n;
}

PathFormula build_path_formula(std::span<const Edge> edges) {
    PathFormula pf;
    for(const Edge& g : edges)
        pf.extend(g);
    return pf;
}

Formula initial_store(const std::vector<std::string>& variables) {
    std::vector<Formula> parts;
    for(const auto& v : variables)
        parts.push_back(Formula::compare(Poly::var(ssa_name(v, 0)), ExprKind::Eq, Poly::value(0)));
    return conj(std::move(parts));
}

} // namespace cmc
