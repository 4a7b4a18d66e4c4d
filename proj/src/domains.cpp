#include <cmc/domains.hpp>
#include <cmc/path_formula.hpp>

#include <algorithm>
#include <bit>
#include <cctype>
#include <set>
#include <sstream>

namespace cmc {

std::vector<std::optional<LocationId>> location_transfer(std::optional<LocationId> s,
                                                         const Edge& g) {
    if(s && *s != g.source)
        return {};
    return {g.target};
}

std::vector<ExplicitState> explicit_transfer(const ExplicitState& s, const Edge& g,
                                             bool* overflowed) {
    Lookup lookup = [&](const std::string& v) -> std::optional<Value> {
        auto it = s.values.find(v);
        if(it == s.values.end())
            return std::nullopt;
        return it->second;
    };
    ExplicitState next = s;
    if(const auto* a = std::get_if<Assign>(&g.op)) {
        bool lost = false;
        std::optional<Value> v = eval_term(a->term, lookup, &lost);
        if(lost && overflowed)
            *overflowed = true;
        if(v)
            next.values[a->var] = *v;
        else
            next.values.erase(a->var);
        return {std::move(next)};
    }
    if(const auto* a = std::get_if<Assume>(&g.op)) {
        std::optional<bool> holds = eval_condition(a->condition, lookup);
        if(holds && !*holds)
            return {};
        return {std::move(next)};
    }
    next.values.erase(std::get<Havoc>(g.op).var);
    return {std::move(next)};
}

bool explicit_covers(const ExplicitState& covering, const ExplicitState& s) {
    for(auto& [v, x] : covering.values) {
        auto it = s.values.find(v);
        if(it == s.values.end() || it->second != x)
            return false;
    }
    return true;
}

bool explicit_stop(const ExplicitState& s, const std::vector<ExplicitState>& reached) {
    return std::any_of(reached.begin(), reached.end(),
                       [&](const ExplicitState& r) { return explicit_covers(r, s); });
}

Formula render(const ExplicitState& s) {
    std::vector<Formula> parts;
    for(auto& [v, x] : s.values)
        parts.push_back(Formula::compare(Poly::var(v), ExprKind::Eq, Poly::value(x)));
    return conj(std::move(parts));
}

std::string explicit_key(const ExplicitState& s) {
    std::string key;
    for(auto& [v, x] : s.values)
        key += v + "=" + std::to_string(x) + ",";
    return key;
}

std::vector<std::string> explicit_cover_keys(const ExplicitState& s) {
    // Beyond this many defined variables only equal states are found, which
    // gives less coverage but stays sound.
    constexpr std::size_t max_subset_vars = 12;
    if(s.values.size() > max_subset_vars)
        return {explicit_key(s)};
    std::vector<std::string> parts;
    for(auto& [v, x] : s.values)
        parts.push_back(v + "=" + std::to_string(x) + ",");
    std::vector<std::string> keys;
    unsigned n = static_cast<unsigned>(parts.size());
    for(unsigned mask = 0; mask < (1u << n); ++mask) {
        std::string key;
        for(unsigned i = 0; i < n; ++i)
            if(mask & (1u << i))
                key += parts[i];
        keys.push_back(std::move(key));
    }
    return keys;
}

bool Precision::add(LocationId l, const Atom& a) {
    return m_local[l].emplace(a.str(), a).second;
}

bool Precision::add_global(const Atom& a) { return m_global.emplace(a.str(), a).second; }

std::vector<Atom> Precision::at(LocationId l) const {
    std::map<std::string, Atom> all = m_global;
    if(auto it = m_local.find(l); it != m_local.end())
        all.insert(it->second.begin(), it->second.end());
    std::vector<Atom> out;
    for(auto& [text, a] : all)
        out.push_back(a);
    return out;
}

std::size_t Precision::size() const {
    std::size_t n = m_global.size();
    for(auto& [l, atoms] : m_local)
        n += atoms.size();
    return n;
}

std::string Precision::dump() const {
    std::ostringstream out;
    for(auto& [l, atoms] : m_local)
        for(auto& [text, a] : atoms)
            out << "loc L" << raw(l) << ": " << text << ";\n";
    for(auto& [text, a] : m_global)
        out << "global: " << text << ";\n";
    return out.str();
}

namespace {

Atom parse_atom(std::string_view text) {
    Formula f = parse_formula(text);
    if(f.kind() == FKind::Not)
        f = f.operand();
    if(f.kind() != FKind::Atom)
        throw Error("precision entry is not an atom: " + std::string(text));
    return f.as_atom();
}

std::string_view trim(std::string_view s) {
    while(!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while(!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

} // namespace

Precision Precision::load(std::string_view text) {
    Precision p;
    std::size_t start = 0;
    while(start < text.size()) {
        std::size_t end = text.find(';', start);
        if(end == std::string_view::npos)
            end = text.size();
        std::string_view item = trim(text.substr(start, end - start));
        start = end + 1;
        if(item.empty())
            continue;
        std::size_t colon = item.find(':');
        if(colon == std::string_view::npos)
            throw Error("precision entry without ':': " + std::string(item));
        std::string_view head = trim(item.substr(0, colon));
        Atom a = parse_atom(item.substr(colon + 1));
        if(head == "global") {
            p.add_global(a);
        } else if(head.starts_with("loc") && trim(head.substr(3)).starts_with("L")) {
            std::string_view num = trim(head.substr(3)).substr(1);
            p.add(LocationId{static_cast<std::uint32_t>(std::stoul(std::string(num)))}, a);
        } else {
            throw Error("bad precision entry: " + std::string(item));
        }
    }
    return p;
}

std::vector<std::pair<unsigned, unsigned>> minimize_minterms(const std::vector<unsigned>& minterms,
                                                             unsigned n) {
    using Implicant = std::pair<unsigned, unsigned>; // values, care mask
    unsigned all = n == 0 ? 0 : (n >= 32 ? ~0u : (1u << n) - 1);
    std::set<Implicant> current;
    for(unsigned m : minterms)
        current.emplace(m & all, all);
    std::set<Implicant> primes;
    while(!current.empty()) {
        std::set<Implicant> next;
        std::set<Implicant> combined;
        for(auto a = current.begin(); a != current.end(); ++a) {
            for(auto b = std::next(a); b != current.end(); ++b) {
                if(a->second != b->second)
                    continue;
                unsigned diff = a->first ^ b->first;
                if(std::popcount(diff) != 1)
                    continue;
                next.emplace(a->first & ~diff, a->second & ~diff);
                combined.insert(*a);
                combined.insert(*b);
            }
        }
        for(const auto& i : current)
            if(!combined.count(i))
                primes.insert(i);
        current = std::move(next);
    }
    auto covers = [](const Implicant& i, unsigned m) { return (m & i.second) == i.first; };
    std::vector<Implicant> order(primes.begin(), primes.end());
    // larger implicants first, then by the set order
    std::stable_sort(order.begin(), order.end(), [](const Implicant& a, const Implicant& b) {
        return std::popcount(a.second) < std::popcount(b.second);
    });
    std::set<unsigned> uncovered;
    for(unsigned m : minterms)
        uncovered.insert(m & all);
    std::vector<Implicant> chosen;
    auto take = [&](const Implicant& i) {
        chosen.push_back(i);
        for(auto it = uncovered.begin(); it != uncovered.end();)
            it = covers(i, *it) ? uncovered.erase(it) : std::next(it);
    };
    // essential primes
    for(unsigned m : std::set<unsigned>(uncovered)) {
        if(!uncovered.count(m))
            continue;
        const Implicant* only = nullptr;
        int count = 0;
        for(const auto& i : order)
            if(covers(i, m)) {
                ++count;
                only = &i;
            }
        if(count == 1 && std::find(chosen.begin(), chosen.end(), *only) == chosen.end())
            take(*only);
    }
    while(!uncovered.empty()) {
        const Implicant* best = nullptr;
        std::size_t best_count = 0;
        for(const auto& i : order) {
            std::size_t c = 0;
            for(unsigned m : uncovered)
                c += covers(i, m);
            if(c > best_count) {
                best = &i;
                best_count = c;
            }
        }
        take(*best);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::optional<Formula> abstract_formula(const Formula& sp, const std::vector<Formula>& preds,
                                        const std::vector<Formula>& out, Solver& solver,
                                        const AbstractionOptions& options) {
    try {
        std::size_t n = preds.size();
        if(n > options.minterm_bound) {
            if(solver.is_satisfiable(sp) == SatResult::Unsat)
                return std::nullopt;
            std::vector<Formula> lits;
            for(std::size_t i = 0; i < n; ++i) {
                if(solver.entails(sp, preds[i]) == Entailment::Yes)
                    lits.push_back(out[i]);
                else if(solver.entails(sp, !preds[i]) == Entailment::Yes)
                    lits.push_back(!out[i]);
            }
            return conj(std::move(lits));
        }
        std::vector<unsigned> minterms;
        auto search = [&](auto& self, std::size_t i, const Formula& acc, unsigned mask) -> void {
            if(solver.is_satisfiable(acc) == SatResult::Unsat)
                return;
            if(i == n) {
                minterms.push_back(mask);
                return;
            }
            self(self, i + 1, acc & preds[i], mask | (1u << i));
            self(self, i + 1, acc & !preds[i], mask);
        };
        search(search, 0, sp, 0);
        if(minterms.empty())
            return std::nullopt;
        std::vector<Formula> cubes;
        for(auto [values, care] : minimize_minterms(minterms, static_cast<unsigned>(n))) {
            std::vector<Formula> lits;
            for(std::size_t i = 0; i < n; ++i)
                if(care & (1u << i))
                    lits.push_back(values & (1u << i) ? out[i] : !out[i]);
            cubes.push_back(conj(std::move(lits)));
        }
        return disj(std::move(cubes));
    } catch(const FormulaTooLarge& e) {
        throw AbstractionFailure(e.what());
    }
}

StrongestPost strongest_post(const PredicateState& s, const Edge& g) {
    Formula premise = rename(s.abstraction, [](const std::string& v) { return ssa_name(v, 0); });
    PathFormula pf;
    pf.extend(g);
    std::map<std::string, int> ssa = pf.ssa;
    Rename post = [ssa](const std::string& v) {
        auto it = ssa.find(v);
        return ssa_name(v, it == ssa.end() ? 0 : it->second);
    };
    return {premise & pf.formula(), post};
}

std::vector<PredicateState> predicate_transfer(const PredicateState& s, const Edge& g,
                                               const Precision& precision, Solver& solver,
                                               const AbstractionOptions& options) {
    StrongestPost sp;
    try {
        sp = strongest_post(s, g);
    } catch(const ArithmeticOverflow& e) {
        throw AbstractionFailure(e.what());
    }
    std::vector<Formula> preds;
    std::vector<Formula> out;
    for(const Atom& a : precision.at(g.target)) {
        out.push_back(Formula::atom(a));
        preds.push_back(rename(out.back(), sp.post));
    }
    std::optional<Formula> abstraction = abstract_formula(sp.formula, preds, out, solver, options);
    if(!abstraction)
        return {};
    return {PredicateState{*abstraction}};
}

bool predicate_stop(const PredicateState& s, const std::vector<PredicateState>& reached,
                    Solver& solver) {
    return std::any_of(reached.begin(), reached.end(), [&](const PredicateState& r) {
        return solver.entails(s.abstraction, r.abstraction) == Entailment::Yes;
    });
}

} // namespace cmc
