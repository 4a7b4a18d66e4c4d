#pragma once

// Worklist reachability over a configurable program analysis, recording the
// abstract reachability tree with covered leaves.

#include <cmc/cfa.hpp>
#include <cmc/conditions.hpp>

#include <concepts>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace cmc {

enum class WaitlistOrder { Dfs, Bfs };

inline const char* to_string(WaitlistOrder order) {
    return order == WaitlistOrder::Dfs ? "dfs" : "bfs";
}

// Pure waitlist discipline: DFS pops the last inserted, BFS the first.
template <class T> class Waitlist {
  public:
    explicit Waitlist(WaitlistOrder order) : m_order(order) {}

    void push(T x) { m_items.push_back(std::move(x)); }
    bool empty() const { return m_items.empty(); }
    std::size_t size() const { return m_items.size(); }

    T pop() {
        T x;
        if(m_order == WaitlistOrder::Dfs) {
            x = std::move(m_items.back());
            m_items.pop_back();
        } else {
            x = std::move(m_items.front());
            m_items.pop_front();
        }
        return x;
    }

  private:
    WaitlistOrder m_order;
    std::deque<T> m_items;
};

// successors() applies transfer and strengthen for one edge; `skip` asks
// for an excluded successor without computing the domain post. merge()
// returns nullopt for "keep the reached state". stop() compares against a
// single reached state. States that may merge share an index key; every
// state that may cover s is stored under one of cover_keys(s).
template <class C>
concept ConfigurableAnalysis = requires(C& cpa, const typename C::State& s, const Edge& g) {
    { cpa.successors(s, g, bool{}) } -> std::same_as<std::vector<typename C::State>>;
    { cpa.merge(s, s) } -> std::same_as<std::optional<typename C::State>>;
    { cpa.stop(s, s) } -> std::same_as<bool>;
    { cpa.location(s) } -> std::same_as<LocationId>;
    { cpa.is_excluded(s) } -> std::same_as<bool>;
    { cpa.is_target(s) } -> std::same_as<bool>;
    { cpa.index_key(s) } -> std::same_as<std::string>;
    { cpa.cover_keys(s) } -> std::same_as<std::vector<std::string>>;
};

using NodeId = std::size_t;

enum class NodeStatus { Reached, Covered, Removed };
enum class RunStatus { Finished, Halted, TargetFound };

struct EngineStats {
    std::size_t iterations = 0;
    std::size_t posts = 0;
    std::size_t merges = 0;
    std::size_t covered = 0;
};

template <ConfigurableAnalysis Cpa> class Reachability {
  public:
    using State = typename Cpa::State;

    struct Node {
        State state;
        std::optional<NodeId> parent;
        EdgeId via{};
        std::vector<NodeId> children;
        std::optional<NodeId> covered_by;
        std::vector<NodeId> covering; // covered leaves pointing here
        NodeStatus status = NodeStatus::Reached;
        bool in_waitlist = false;
        std::uint64_t ticket = 0;
        std::uint64_t generation = 0;
    };

    Reachability(const Cfa& cfa, Cpa& cpa, WaitlistOrder order, GlobalMonitor* monitor = nullptr)
        : m_cfa(cfa), m_cpa(cpa), m_queue(order), m_monitor(monitor) {}

    NodeId add_root(State s) {
        NodeId id = add_node(std::move(s), std::nullopt, EdgeId{0});
        return id;
    }

    RunStatus run() {
        while(true) {
            if(m_waiting == 0)
                return RunStatus::Finished;
            if(m_monitor && m_monitor->should_halt(m_reached) == MonitorDecision::HaltGlobal)
                return RunStatus::Halted;
            std::optional<NodeId> id = pop();
            if(!id)
                return RunStatus::Finished;
            ++m_stats.iterations;
            if(!expand(*id))
                return RunStatus::Halted;
            if(has_target())
                return RunStatus::TargetFound;
        }
    }

    bool has_target() {
        while(!m_targets.empty() && !pending(m_targets.front()))
            m_targets.pop_front();
        return !m_targets.empty();
    }

    // Next unexcluded target state still in the tree.
    std::optional<NodeId> take_target() {
        if(!has_target())
            return std::nullopt;
        NodeId id = m_targets.front();
        m_targets.pop_front();
        return id;
    }

    const std::vector<Node>& nodes() const { return m_nodes; }
    const Node& node(NodeId id) const { return m_nodes[id]; }
    const EngineStats& stats() const { return m_stats; }
    std::size_t reached_size() const { return m_reached; }
    std::size_t waitlist_size() const { return m_waiting; }

    std::vector<NodeId> reached() const {
        std::vector<NodeId> out;
        for(NodeId i = 0; i < m_nodes.size(); ++i)
            if(m_nodes[i].status == NodeStatus::Reached)
                out.push_back(i);
        return out;
    }

    bool in_waitlist(NodeId id) const {
        return m_nodes[id].in_waitlist && m_nodes[id].status == NodeStatus::Reached;
    }

    // Root first.
    std::vector<NodeId> path_to(NodeId id) const {
        std::vector<NodeId> rev{id};
        while(m_nodes[rev.back()].parent)
            rev.push_back(*m_nodes[rev.back()].parent);
        return {rev.rbegin(), rev.rend()};
    }

    std::vector<Edge> edges_to(NodeId id) const {
        std::vector<Edge> out;
        for(NodeId n : path_to(id))
            if(m_nodes[n].parent)
                out.push_back(m_cfa.edge(m_nodes[n].via));
        return out;
    }

    void enqueue(NodeId id) {
        Node& n = m_nodes[id];
        if(n.status != NodeStatus::Reached)
            return;
        if(!n.in_waitlist)
            ++m_waiting;
        n.in_waitlist = true;
        n.ticket = ++m_tickets;
        m_queue.push({id, n.ticket});
    }

    // Replaces the state of a reached node in place and takes it off the
    // waitlist; used to record excluding assumptions.
    void exclude(NodeId id, State state) {
        Node& n = m_nodes[id];
        n.state = std::move(state);
        dequeue(id);
    }

    // Removes the node and its descendants. Covered leaves whose coverer
    // disappears are dropped and their parents re-enqueued.
    void remove_subtree(NodeId root) {
        std::vector<NodeId> gone;
        std::vector<NodeId> stack{root};
        while(!stack.empty()) {
            NodeId id = stack.back();
            stack.pop_back();
            Node& n = m_nodes[id];
            if(n.status == NodeStatus::Removed)
                continue;
            if(n.status == NodeStatus::Reached)
                --m_reached;
            dequeue(id);
            n.status = NodeStatus::Removed;
            gone.push_back(id);
            for(NodeId c : n.children)
                stack.push_back(c);
        }
        if(auto p = m_nodes[root].parent)
            std::erase(m_nodes[*p].children, root);
        for(NodeId id : gone) {
            for(NodeId leaf : m_nodes[id].covering) {
                Node& l = m_nodes[leaf];
                if(l.status != NodeStatus::Covered)
                    continue;
                l.status = NodeStatus::Removed;
                NodeId p = *l.parent;
                std::erase(m_nodes[p].children, leaf);
                if(m_nodes[p].status == NodeStatus::Reached && !m_cpa.is_excluded(m_nodes[p].state) &&
                   !m_cpa.is_target(m_nodes[p].state))
                    enqueue(p);
            }
        }
    }

  private:
    struct Entry {
        NodeId id = 0;
        std::uint64_t ticket = 0;
    };

    bool pending(NodeId id) const {
        return m_nodes[id].status == NodeStatus::Reached && !m_cpa.is_excluded(m_nodes[id].state);
    }

    void dequeue(NodeId id) {
        Node& n = m_nodes[id];
        if(n.in_waitlist && n.status == NodeStatus::Reached)
            --m_waiting;
        n.in_waitlist = false;
    }

    std::optional<NodeId> pop() {
        while(!m_queue.empty()) {
            Entry e = m_queue.pop();
            Node& n = m_nodes[e.id];
            if(n.in_waitlist && n.ticket == e.ticket && n.status == NodeStatus::Reached) {
                dequeue(e.id);
                return e.id;
            }
        }
        return std::nullopt;
    }

    NodeId add_node(State s, std::optional<NodeId> parent, EdgeId via) {
        NodeId id = m_nodes.size();
        Node n;
        n.state = std::move(s);
        n.parent = parent;
        n.via = via;
        m_nodes.push_back(std::move(n));
        ++m_reached;
        if(parent)
            m_nodes[*parent].children.push_back(id);
        m_index[m_cpa.index_key(m_nodes[id].state)].push_back(id);
        const State& st = m_nodes[id].state;
        if(m_cpa.is_excluded(st))
            return id;
        if(m_cpa.is_target(st))
            m_targets.push_back(id);
        else
            enqueue(id);
        return id;
    }

    // False when the monitor ran out of fuel; the node is then put back.
    bool expand(NodeId id) {
        std::uint64_t generation = m_nodes[id].generation;
        LocationId l = m_cpa.location(m_nodes[id].state);
        for(EdgeId e : m_cfa.outgoing(l)) {
            if(m_monitor && m_monitor->fuel_exhausted()) {
                enqueue(id);
                return false;
            }
            const Edge& g = m_cfa.edge(e);
            bool skip = false;
            if(m_monitor)
                skip = m_monitor->busy_edge_check(g) == EdgeDecision::SkipWithAssumption;
            ++m_stats.posts;
            State from = m_nodes[id].state;
            for(State& s : m_cpa.successors(from, g, skip)) {
                handle(id, e, std::move(s));
                if(m_nodes[id].status != NodeStatus::Reached || m_nodes[id].generation != generation)
                    return true;
            }
        }
        return true;
    }

    void handle(NodeId parent, EdgeId via, State s) {
        std::uint64_t generation = m_nodes[parent].generation;
        std::vector<NodeId> partners = m_index[m_cpa.index_key(s)];
        for(NodeId r : partners) {
            if(m_nodes[r].status != NodeStatus::Reached)
                continue;
            std::optional<State> merged = m_cpa.merge(s, m_nodes[r].state);
            if(merged && !(*merged == m_nodes[r].state)) {
                ++m_stats.merges;
                replace(r, std::move(*merged));
            }
        }
        if(m_nodes[parent].status != NodeStatus::Reached || m_nodes[parent].generation != generation)
            return;
        for(const std::string& key : m_cpa.cover_keys(s)) {
            auto it = m_index.find(key);
            if(it == m_index.end())
                continue;
            for(NodeId r : it->second) {
                if(m_nodes[r].status != NodeStatus::Reached || !m_cpa.stop(s, m_nodes[r].state))
                    continue;
                ++m_stats.covered;
                NodeId leaf = m_nodes.size();
                Node n;
                n.state = std::move(s);
                n.parent = parent;
                n.via = via;
                n.status = NodeStatus::Covered;
                n.covered_by = r;
                m_nodes.push_back(std::move(n));
                m_nodes[parent].children.push_back(leaf);
                m_nodes[r].covering.push_back(leaf);
                return;
            }
        }
        add_node(std::move(s), parent, via);
    }

    // Merge result replaces a reached state: its subtree is dropped and the
    // node goes back to the waitlist.
    void replace(NodeId id, State merged) {
        for(NodeId c : std::vector<NodeId>(m_nodes[id].children))
            remove_subtree(c);
        Node& n = m_nodes[id];
        n.state = std::move(merged);
        ++n.generation;
        if(m_cpa.is_excluded(n.state)) {
            dequeue(id);
            return;
        }
        if(m_cpa.is_target(n.state))
            m_targets.push_back(id);
        else
            enqueue(id);
    }

    const Cfa& m_cfa;
    Cpa& m_cpa;
    Waitlist<Entry> m_queue;
    GlobalMonitor* m_monitor;
    std::vector<Node> m_nodes;
    std::unordered_map<std::string, std::vector<NodeId>> m_index;
    std::deque<NodeId> m_targets;
    std::size_t m_reached = 0;
    std::size_t m_waiting = 0;
    std::uint64_t m_tickets = 0;
    EngineStats m_stats;
};

} // namespace cmc
