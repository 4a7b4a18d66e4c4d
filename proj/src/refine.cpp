#include <cmc/path_formula.hpp>
#include <cmc/refine.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace cmc {

const char* to_string(Feasibility f) {
    switch(f) {
    case Feasibility::Feasible: return "feasible";
    case Feasibility::Infeasible: return "infeasible";
    case Feasibility::Unconfirmed: return "unconfirmed";
    }
    return "?";
}

namespace {

bool prefix_unsat(const Formula& init, const PathFormula& pf, std::size_t k, Solver& solver) {
    std::vector<Formula> parts{init};
    parts.insert(parts.end(), pf.steps.begin(), pf.steps.begin() + static_cast<std::ptrdiff_t>(k));
    try {
        return solver.is_satisfiable(conj(std::move(parts))) == SatResult::Unsat;
    } catch(const FormulaTooLarge&) {
        return false;
    }
}

std::optional<std::vector<ConcreteStep>> replay(const Cfa& cfa, std::span<const Edge> path,
                                                const Model& model) {
    std::map<std::string, Value> store;
    for(const auto& v : cfa.variables())
        store[v] = 0;
    Lookup lookup = [&](const std::string& v) -> std::optional<Value> {
        auto it = store.find(v);
        if(it == store.end())
            return std::nullopt;
        return it->second;
    };
    PathFormula pf;
    std::vector<ConcreteStep> out;
    for(const Edge& g : path) {
        pf.extend(g);
        if(const auto* a = std::get_if<Assign>(&g.op)) {
            std::optional<Value> v = eval_term(a->term, lookup);
            if(!v)
                return std::nullopt;
            store[a->var] = *v;
        } else if(const auto* h = std::get_if<Havoc>(&g.op)) {
            auto it = model.find(pf.current(h->var));
            store[h->var] = it == model.end() ? 0 : it->second;
        } else {
            if(eval_condition(std::get<Assume>(g.op).condition, lookup) != true)
                return std::nullopt;
        }
        out.push_back({g.id, g.target, store});
    }
    return out;
}

} // namespace

FeasibilityResult check_feasibility(const Cfa& cfa, std::span<const Edge> path, Solver& solver) {
    std::size_t n = path.size();
    FeasibilityResult unconfirmed{Feasibility::Unconfirmed, n, {}};
    PathFormula pf;
    Formula init = initial_store(cfa.variables());
    try {
        for(const Edge& g : path)
            pf.extend(g);
    } catch(const ArithmeticOverflow&) {
        return unconfirmed;
    }
    if(prefix_unsat(init, pf, n, solver)) {
        // prefixes only add constraints, so unsatisfiability is monotone
        std::size_t lo = 0, hi = n;
        while(lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if(prefix_unsat(init, pf, mid, solver))
                hi = mid;
            else
                lo = mid + 1;
        }
        return {Feasibility::Infeasible, lo, {}};
    }
    SatOutcome sat;
    try {
        sat = check_sat(init & pf.formula(), solver.options());
    } catch(const FormulaTooLarge&) {
        return unconfirmed;
    }
    if(sat.result != SatResult::Sat)
        return unconfirmed;
    auto witness = replay(cfa, path, sat.model);
    if(!witness)
        return unconfirmed;
    return {Feasibility::Feasible, n, std::move(*witness)};
}

namespace {

std::optional<Atom> substitute(const Atom& atom, const Assign& a) {
    if(!atom.lhs.contains(a.var))
        return atom;
    Poly term;
    try {
        term = to_poly(a.term);
    } catch(const ArithmeticOverflow&) {
        return std::nullopt;
    }
    if(std::any_of(term.terms.begin(), term.terms.end(),
                   [](const auto& t) { return monomial_factors(t.first).size() > 1; }))
        return std::nullopt;
    Poly lhs;
    try {
        for(const auto& [m, c] : atom.lhs)
            lhs = lhs + Poly::value(c) * (m == a.var ? term : Poly::var(m));
    } catch(const ArithmeticOverflow&) {
        return std::nullopt;
    }
    Formula f = Formula::compare(lhs, atom.rel == Rel::Le ? ExprKind::Le : ExprKind::Eq,
                                 Poly::value(atom.rhs));
    if(f.kind() != FKind::Atom)
        return std::nullopt;
    return f.as_atom();
}

bool linear(const Atom& a) {
    return std::all_of(a.lhs.begin(), a.lhs.end(),
                       [](const auto& t) { return monomial_factors(t.first).size() == 1; });
}

} // namespace

std::vector<MinedAtom> mine_atoms(std::span<const Edge> path) {
    std::vector<MinedAtom> out;
    std::map<std::string, std::size_t> seen;
    std::size_t origin = 0;
    auto keep = [&](const Atom& a) {
        auto [it, fresh] = seen.emplace(a.str(), out.size());
        if(fresh)
            out.push_back({a, origin});
        else
            out[it->second].origin = std::max(out[it->second].origin, origin);
    };
    for(std::size_t i = 0; i < path.size(); ++i) {
        const auto* assume = std::get_if<Assume>(&path[i].op);
        if(!assume)
            continue;
        origin = i;
        std::vector<Atom> atoms;
        try {
            collect_atoms(to_formula(assume->condition), atoms);
        } catch(const ArithmeticOverflow&) {
            continue;
        }
        for(Atom atom : atoms) {
            keep(atom);
            if(!linear(atom))
                continue;
            for(std::size_t j = i; j-- > 0;) {
                const Operation& op = path[j].op;
                if(const auto* h = std::get_if<Havoc>(&op)) {
                    if(atom.lhs.contains(h->var))
                        break;
                } else if(const auto* a = std::get_if<Assign>(&op)) {
                    if(!atom.lhs.contains(a->var))
                        continue;
                    std::optional<Atom> next = substitute(atom, *a);
                    if(!next)
                        break;
                    atom = *next;
                    keep(atom);
                }
            }
        }
    }
    return out;
}

std::vector<std::pair<LocationId, Atom>> mine_predicates(std::span<const Edge> path,
                                                         std::span<const LocationId> locations,
                                                         std::size_t pivot) {
    std::vector<std::pair<LocationId, Atom>> out;
    std::set<std::pair<std::uint32_t, std::string>> seen;
    for(const MinedAtom& m : mine_atoms(path)) {
        std::size_t last = std::min({pivot, m.origin + 1, locations.size() - 1});
        for(std::size_t k = 0; k <= last && k < locations.size(); ++k)
            if(seen.emplace(raw(locations[k]), m.atom.str()).second)
                out.emplace_back(locations[k], m.atom);
    }
    return out;
}

std::string witness_text(const Cfa& cfa, const std::vector<ConcreteStep>& witness) {
    std::ostringstream out;
    for(std::size_t k = 0; k < witness.size(); ++k) {
        const ConcreteStep& s = witness[k];
        out << "step " << k << ": edge " << raw(s.edge) << " " << op_str(cfa.edge(s.edge).op) << "; store {";
        bool first = true;
        for(const auto& [v, val] : s.store) {
            out << (first ? "" : ",") << v << "=" << val;
            first = false;
        }
        out << "}\n";
    }
    return out.str();
}

} // namespace cmc
