#ifndef AGENTNET_RUNNER_HPP
#define AGENTNET_RUNNER_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "agentnet/engine.hpp"
#include "agentnet/mst.hpp"
#include "agentnet/oracle.hpp"

namespace agentnet {

// ---------------------------------------------------------------------------
// Stop predicates.

inline bool all_done(const Configuration& c) {
    for (const auto& s : c.states)
        if (s.phase != MstPhase::Done || s.away) return false;
    return true;
}

inline bool all_frozen(const Configuration& c) {
    for (const auto& s : c.states)
        if (!s.bfs_frozen || s.away) return false;
    return true;
}

inline std::function<bool(const Configuration&)> stop_predicate(Algorithm algo) {
    switch (algo) {
        case Algorithm::mst:
        case Algorithm::leader:
            return all_done;
        default:
            return all_frozen;
    }
}

// ---------------------------------------------------------------------------
// Standalone BFS setup for unit testing: skips tree construction entirely and
// presets the tree-phase outcome (known parameters, a chosen root) so the BFS
// segment starts at round 0.

inline void setup_standalone_bfs(Configuration& c, NodeId root, BfsMode mode,
                                 std::int64_t m_override = -1) {
    const PortLabeledGraph& g = *c.graph;
    int n = g.node_count;
    std::int64_t m = 0, dmax = 1;
    for (NodeId v = 0; v < n; ++v) {
        m += g.degree(v);
        dmax = std::max<std::int64_t>(dmax, g.degree(v));
    }
    m /= 2;
    if (m_override > 0) m = m_override;
    for (int i = 0; i < c.n_agents(); ++i) {
        AgentState& s = c.states[i];
        s.phase = MstPhase::Done;
        s.params_set = true;
        s.params_n = n;
        s.params_m = std::max<std::int64_t>(1, m);
        s.params_delta = dmax;
        s.bfs_mode = mode;
        s.bfs_start = 0;
        if (c.placement[i] == root) {
            s.level = 0;
            s.bfs_root = true;
            s.is_leader = true;
        }
    }
}

// ---------------------------------------------------------------------------
// Result verification against classical single-machine algorithms.

struct VerifyResult {
    bool ok = true;
    std::vector<std::string> problems;

    void complain(std::string p) {
        ok = false;
        problems.push_back(std::move(p));
    }
};

// IDs indexed by home node. Valid once every agent is back home, which the
// stop predicates guarantee.
inline std::vector<int> ids_by_home(const Configuration& c) {
    std::vector<int> ids(c.graph->node_count, -1);
    for (int i = 0; i < c.n_agents(); ++i) ids[c.placement[i]] = c.states[i].id;
    return ids;
}

inline VerifyResult verify_leader(const Configuration& c) {
    VerifyResult r;
    int leaders = 0;
    for (const auto& s : c.states)
        if (s.is_leader) ++leaders;
    if (leaders != 1) r.complain("expected exactly 1 leader, found " + std::to_string(leaders));
    for (const auto& s : c.states) {
        if (!s.is_leader && s.parent_port == kNoPort)
            r.complain("non-leader agent " + std::to_string(s.id) + " has no parent");
        if (s.is_leader && s.parent_port != kNoPort)
            r.complain("leader agent " + std::to_string(s.id) + " has a parent");
    }
    return r;
}

inline VerifyResult verify_mst(const Configuration& c) {
    VerifyResult r = verify_leader(c);
    const PortLabeledGraph& g = *c.graph;
    std::set<std::pair<NodeId, NodeId>> tree;
    for (int i = 0; i < c.n_agents(); ++i) {
        const AgentState& s = c.states[i];
        if (s.parent_port == kNoPort) continue;
        NodeId v = c.placement[i];
        if (s.parent_port < 0 || s.parent_port >= g.degree(v)) {
            r.complain("agent " + std::to_string(s.id) + " parent port out of range");
            continue;
        }
        NodeId u = g.adjacency[v][s.parent_port].neighbor;
        tree.insert({std::min(u, v), std::max(u, v)});
    }
    if (static_cast<int>(tree.size()) != g.node_count - 1)
        r.complain("tree has " + std::to_string(tree.size()) + " edges, expected " +
                   std::to_string(g.node_count - 1));
    auto want = oracle::kruskal_virtual(g, ids_by_home(c));
    if (tree != want) r.complain("tree does not match the minimum spanning tree");
    return r;
}

inline VerifyResult verify_bfs(const Configuration& c) {
    VerifyResult r;
    const PortLabeledGraph& g = *c.graph;
    NodeId root = -1;
    for (int i = 0; i < c.n_agents(); ++i)
        if (c.states[i].bfs_root || (c.states[i].is_leader && c.states[i].level == 0))
            root = c.placement[i];
    if (root < 0) {
        r.complain("no root agent found");
        return r;
    }
    std::vector<int> want = oracle::classical_bfs(g, root);
    for (int i = 0; i < c.n_agents(); ++i) {
        const AgentState& s = c.states[i];
        NodeId v = c.placement[i];
        if (s.level != want[v]) {
            r.complain("node " + std::to_string(v) + " level " + std::to_string(s.level) +
                       ", expected " + std::to_string(want[v]));
            continue;
        }
        if (v == root) continue;
        if (s.bfs_parent_port < 0 || s.bfs_parent_port >= g.degree(v)) {
            r.complain("node " + std::to_string(v) + " has no valid parent port");
            continue;
        }
        NodeId u = g.adjacency[v][s.bfs_parent_port].neighbor;
        if (want[u] != want[v] - 1)
            r.complain("node " + std::to_string(v) + " parent is not one level closer");
    }
    return r;
}

inline VerifyResult verify_run(const Configuration& c, Algorithm algo) {
    switch (algo) {
        case Algorithm::mst: return verify_mst(c);
        case Algorithm::leader: return verify_leader(c);
        default: {
            VerifyResult r = verify_mst(c);
            VerifyResult b = verify_bfs(c);
            if (!b.ok) {
                r.ok = false;
                for (auto& p : b.problems) r.problems.push_back(std::move(p));
            }
            return r;
        }
    }
}

// ---------------------------------------------------------------------------
// End-to-end runs and reporting.

struct RunOutcome {
    RunMetrics metrics;
    TraceRecorder trace{false};
    bool timed_out = false;
};

inline RunOutcome run_algorithm(Configuration& c, Algorithm algo, std::int64_t max_rounds,
                                bool store_trace = false) {
    TreeProtocol protocol(algo);
    RunOutcome out;
    try {
        auto [metrics, trace] = run_until(c, protocol, stop_predicate(algo), max_rounds,
                                          store_trace);
        out.metrics = std::move(metrics);
        out.trace = std::move(trace);
    } catch (const TimeoutError& e) {
        out.metrics = e.metrics;
        out.timed_out = true;
    }
    return out;
}

inline std::string csv_header() {
    return "graph,n,m,delta,diameter,algorithm,rounds,moves,peak_bits";
}

inline std::string csv_row(const std::string& graph_name, const PortLabeledGraph& g,
                           Algorithm algo, const RunMetrics& m) {
    std::int64_t edges = 0;
    int dmax = 0;
    for (NodeId v = 0; v < g.node_count; ++v) {
        edges += g.degree(v);
        dmax = std::max(dmax, g.degree(v));
    }
    edges /= 2;
    return graph_name + "," + std::to_string(g.node_count) + "," + std::to_string(edges) + "," +
           std::to_string(dmax) + "," + std::to_string(oracle::diameter(g)) + "," +
           algorithm_name(algo) + "," + std::to_string(m.total_rounds) + "," +
           std::to_string(m.total_moves) + "," + std::to_string(m.peak_state_bits);
}

inline void write_trace_jsonl(std::ostream& os, const TraceRecorder& trace) {
    for (const auto& ev : trace.events()) {
        os << "{\"round\":" << ev.round << ",\"agent\":" << ev.agent << ",\"node\":" << ev.node
           << ",\"kind\":\"" << trace_kind_name(ev.kind) << "\",\"detail\":\"" << ev.detail
           << "\"}\n";
    }
}

// The spanning tree as an edge list "u v" (one per line, u < v), for the CLI.
inline std::string tree_edge_list(const Configuration& c) {
    const PortLabeledGraph& g = *c.graph;
    std::set<std::pair<NodeId, NodeId>> tree;
    for (int i = 0; i < c.n_agents(); ++i) {
        const AgentState& s = c.states[i];
        if (s.parent_port == kNoPort) continue;
        NodeId v = c.placement[i];
        NodeId u = g.adjacency[v][s.parent_port].neighbor;
        tree.insert({std::min(u, v), std::max(u, v)});
    }
    std::string out;
    for (auto& [u, v] : tree) out += std::to_string(u) + " " + std::to_string(v) + "\n";
    return out;
}

}  // namespace agentnet

#endif
