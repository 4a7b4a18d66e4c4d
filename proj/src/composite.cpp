#include <cmc/composite.hpp>

namespace cmc {

const char* to_string(DomainKind kind) {
    switch(kind) {
    case DomainKind::Location: return "location";
    case DomainKind::Explicit: return "explicit";
    case DomainKind::Predicate: return "predicate";
    }
    return "?";
}

Formula overflow_transfer(const Edge& g, Value min, Value max) {
    const auto* a = std::get_if<Assign>(&g.op);
    if(!a)
        return Formula::top();
    return Formula::compare(Poly::var(a->var), ExprKind::Ge, Poly::value(min)) &
           Formula::compare(Poly::var(a->var), ExprKind::Le, Poly::value(max));
}

CompositeCpa::CompositeCpa(const Cfa& cfa, CompositeOptions options, Solver& solver,
                           const Precision& precision, const AutomatonObserver* observer)
    : m_cfa(cfa), m_options(options), m_solver(solver), m_precision(precision), m_observer(observer) {}

CompositeState CompositeCpa::initial() const {
    State s;
    s.assumption = Formula::top();
    s.location = m_cfa.initial();
    if(m_options.repeat_k)
        s.repeat = RepeatState{};
    if(m_options.path_limits.path_length || m_options.path_limits.assume_edges)
        s.path = PathStatsState{};
    if(m_observer)
        s.observer = m_observer->initial();
    switch(m_options.domain) {
    case DomainKind::Location: break;
    case DomainKind::Explicit: {
        ExplicitState e;
        for(const auto& v : m_cfa.variables())
            e.values[v] = 0;
        s.domain = std::move(e);
        break;
    }
    case DomainKind::Predicate: s.domain = PredicateState{Formula::top()}; break;
    }
    return s;
}

DomainState CompositeCpa::top() const {
    switch(m_options.domain) {
    case DomainKind::Location: return std::monostate{};
    case DomainKind::Explicit: return ExplicitState{};
    case DomainKind::Predicate: return PredicateState{Formula::top()};
    }
    return std::monostate{};
}

std::vector<CompositeState> CompositeCpa::successors(const State& s, const Edge& g, bool skip) {
    if(s.excluded() || s.location != g.source)
        return {};
    State next;
    next.location = g.target;
    if(s.observer) {
        std::optional<AutomatonStateId> o = m_observer->step(*s.observer, g);
        if(!o) {
            ++m_counters.pruned_by_observer;
            return {};
        }
        next.observer = o;
    }
    if(s.repeat)
        next.repeat = repeat_transfer(*s.repeat, g, *m_options.repeat_k);
    if(s.path)
        next.path = pathstats_transfer(*s.path, g, m_options.path_limits);

    bool failed = skip;
    if(skip) {
        next.domain = top();
    } else if(const auto* e = std::get_if<ExplicitState>(&s.domain)) {
        bool overflowed = false;
        auto out = explicit_transfer(*e, g, &overflowed);
        if(overflowed)
            ++m_counters.explicit_overflows;
        if(out.empty())
            return {};
        next.domain = std::move(out.front());
    } else if(const auto* p = std::get_if<PredicateState>(&s.domain)) {
        try {
            auto out = predicate_transfer(*p, g, m_precision, m_solver, m_options.abstraction);
            if(out.empty())
                return {};
            next.domain = std::move(out.front());
        } catch(const AbstractionFailure&) {
            ++m_counters.abstraction_failures;
            next.domain = top();
            failed = true;
        }
    }

    // strengthen
    next.assumption = Formula::top();
    bool exceeded = (next.repeat && next.repeat->exceeded) || (next.path && next.path->exceeded);
    if(failed || exceeded) {
        next.assumption = Formula::bottom();
    } else if(m_options.overflow) {
        Formula phi = overflow_transfer(g, m_options.overflow_min, m_options.overflow_max);
        next.assumption = phi;
        if(auto* p = std::get_if<PredicateState>(&next.domain); p && !phi.is_true())
            p->abstraction = p->abstraction & phi;
    }
    return {std::move(next)};
}

std::optional<CompositeState> CompositeCpa::merge(const State& fresh, const State& reached) const {
    if(fresh.location != reached.location || fresh.domain != reached.domain ||
       fresh.observer != reached.observer)
        return std::nullopt;
    State out = reached;
    out.assumption = fresh.assumption & reached.assumption;
    if(fresh.repeat && reached.repeat)
        out.repeat = repeat_merge(*fresh.repeat, *reached.repeat);
    if(fresh.path && reached.path)
        out.path = pathstats_merge(*fresh.path, *reached.path);
    return out;
}

bool CompositeCpa::stop(const State& fresh, const State& reached) {
    if(fresh.location != reached.location || fresh.observer != reached.observer)
        return false;
    // the reached state's assumption must be at least as strict
    if(m_solver.entails(reached.assumption, fresh.assumption) != Entailment::Yes)
        return false;
    if(const auto* e = std::get_if<ExplicitState>(&fresh.domain))
        return explicit_covers(std::get<ExplicitState>(reached.domain), *e);
    if(const auto* p = std::get_if<PredicateState>(&fresh.domain))
        return m_solver.entails(p->abstraction, std::get<PredicateState>(reached.domain).abstraction) ==
               Entailment::Yes;
    return true;
}

std::string CompositeCpa::key_prefix(const State& s) const {
    std::string key = std::to_string(raw(s.location));
    if(s.observer)
        key += "/" + std::to_string(*s.observer);
    return key + "|";
}

std::string CompositeCpa::index_key(const State& s) const {
    if(const auto* e = std::get_if<ExplicitState>(&s.domain))
        return key_prefix(s) + explicit_key(*e);
    return key_prefix(s);
}

std::vector<std::string> CompositeCpa::cover_keys(const State& s) const {
    if(const auto* e = std::get_if<ExplicitState>(&s.domain)) {
        std::vector<std::string> keys = explicit_cover_keys(*e);
        std::string prefix = key_prefix(s);
        for(auto& k : keys)
            k = prefix + k;
        return keys;
    }
    return {key_prefix(s)};
}

Formula CompositeCpa::domain_formula(const State& s) const {
    if(const auto* e = std::get_if<ExplicitState>(&s.domain))
        return render(*e);
    if(const auto* p = std::get_if<PredicateState>(&s.domain))
        return p->abstraction;
    return Formula::top();
}

} // namespace cmc
