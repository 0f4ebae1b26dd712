#ifndef AGENTNET_GRAPH_HPP
#define AGENTNET_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "agentnet/common.hpp"

namespace agentnet {

using NodeId = int;
using Port = int;

// Anonymous, connected, undirected, port-labeled graph. Nodes are indexed
// internally by the simulator only; agent logic never sees node indices.
struct PortLabeledGraph {
    struct PortEntry {
        NodeId neighbor = -1;
        Port reverse_port = -1;
    };

    int node_count = 0;
    // adjacency[v][p] describes the edge leaving node v through port p.
    std::vector<std::vector<PortEntry>> adjacency;
    // Optional external integer weights (weighted-input mode); indexed like
    // adjacency. Empty when the graph uses virtual weights.
    std::vector<std::vector<std::int64_t>> ext_weights;

    int degree(NodeId v) const { return static_cast<int>(adjacency[v].size()); }

    int max_degree() const {
        int d = 0;
        for (NodeId v = 0; v < node_count; ++v) d = std::max(d, degree(v));
        return d;
    }

    int edge_count() const {
        int total = 0;
        for (NodeId v = 0; v < node_count; ++v) total += degree(v);
        return total / 2;
    }

    bool weighted() const { return !ext_weights.empty(); }

    // Undirected edge list, as node pairs (u < v), in canonical order.
    std::vector<std::pair<NodeId, NodeId>> edges() const {
        std::vector<std::pair<NodeId, NodeId>> out;
        for (NodeId v = 0; v < node_count; ++v)
            for (const PortEntry& e : adjacency[v])
                if (v < e.neighbor) out.emplace_back(v, e.neighbor);
        std::sort(out.begin(), out.end());
        return out;
    }
};

// (neighbor, reverse port) for the edge leaving v through port p.
inline std::pair<NodeId, Port> neighbor_via_port(const PortLabeledGraph& g, NodeId v, Port p) {
    if (v < 0 || v >= g.node_count) fail(Errc::port_out_of_range, "node out of range");
    if (p < 0 || p >= g.degree(v))
        fail(Errc::port_out_of_range,
             "port " + std::to_string(p) + " at node of degree " + std::to_string(g.degree(v)));
    const auto& e = g.adjacency[v][p];
    return {e.neighbor, e.reverse_port};
}

namespace detail {

inline bool connected(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n <= 0) return false;
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int visited = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++visited;
        for (int u : adj[v])
            if (!seen[u]) {
                seen[u] = 1;
                stack.push_back(u);
            }
    }
    return visited == n;
}

inline void validate_ports(const PortLabeledGraph& g) {
    for (NodeId v = 0; v < g.node_count; ++v) {
        for (Port p = 0; p < g.degree(v); ++p) {
            auto [u, q] = g.adjacency[v][p];
            if (u < 0 || u >= g.node_count || u == v) fail(Errc::invalid_ports, "bad neighbor");
            if (q < 0 || q >= g.degree(u)) fail(Errc::invalid_ports, "bad reverse port");
            const auto& back = g.adjacency[u][q];
            if (back.neighbor != v || back.reverse_port != p)
                fail(Errc::invalid_ports, "port symmetry violated");
        }
    }
}

}  // namespace detail

struct PortRule {
    enum Kind { sorted_adjacency, explicit_ports } kind = sorted_adjacency;
    // For explicit_ports: per edge (in edge_list order) the two ports
    // (port at first endpoint, port at second endpoint).
    std::vector<std::pair<Port, Port>> ports;

    static PortRule sorted() { return {}; }
    static PortRule explicit_map(std::vector<std::pair<Port, Port>> p) {
        PortRule r;
        r.kind = explicit_ports;
        r.ports = std::move(p);
        return r;
    }
};

// Build a validated graph from an unordered edge list. sorted_adjacency gives
// the canonical labeling: ports 0,1,... in ascending neighbor-index order.
inline PortLabeledGraph build_graph(int node_count,
                                    const std::vector<std::pair<NodeId, NodeId>>& edge_list,
                                    const PortRule& rule = PortRule::sorted()) {
    if (node_count < 1) fail(Errc::empty_graph, "node_count must be >= 1");
    std::set<std::pair<NodeId, NodeId>> seen;
    for (auto [u, v] : edge_list) {
        if (u < 0 || v < 0 || u >= node_count || v >= node_count)
            fail(Errc::invalid_edge, "endpoint out of range");
        if (u == v) fail(Errc::invalid_edge, "self-loop");
        auto key = std::minmax(u, v);
        if (!seen.insert({key.first, key.second}).second) fail(Errc::invalid_edge, "multi-edge");
    }
    if (!detail::connected(node_count, edge_list)) fail(Errc::disconnected_graph, "input graph is not connected");

    PortLabeledGraph g;
    g.node_count = node_count;
    g.adjacency.resize(node_count);

    if (rule.kind == PortRule::sorted_adjacency) {
        std::vector<std::vector<NodeId>> nbrs(node_count);
        for (auto [u, v] : edge_list) {
            nbrs[u].push_back(v);
            nbrs[v].push_back(u);
        }
        for (NodeId v = 0; v < node_count; ++v) {
            std::sort(nbrs[v].begin(), nbrs[v].end());
            g.adjacency[v].resize(nbrs[v].size());
        }
        for (NodeId v = 0; v < node_count; ++v)
            for (Port p = 0; p < static_cast<Port>(nbrs[v].size()); ++p) {
                NodeId u = nbrs[v][p];
                Port q = static_cast<Port>(
                    std::lower_bound(nbrs[u].begin(), nbrs[u].end(), v) - nbrs[u].begin());
                g.adjacency[v][p] = {u, q};
            }
    } else {
        if (rule.ports.size() != edge_list.size())
            fail(Errc::invalid_ports, "explicit port map size mismatch");
        std::vector<int> deg(node_count, 0);
        for (std::size_t i = 0; i < edge_list.size(); ++i) {
            deg[edge_list[i].first] = std::max(deg[edge_list[i].first], rule.ports[i].first + 1);
            deg[edge_list[i].second] = std::max(deg[edge_list[i].second], rule.ports[i].second + 1);
        }
        for (NodeId v = 0; v < node_count; ++v) g.adjacency[v].resize(deg[v]);
        for (std::size_t i = 0; i < edge_list.size(); ++i) {
            auto [u, v] = edge_list[i];
            auto [pu, pv] = rule.ports[i];
            if (pu < 0 || pv < 0) fail(Errc::invalid_ports, "negative port");
            if (g.adjacency[u][pu].neighbor != -1 || g.adjacency[v][pv].neighbor != -1)
                fail(Errc::invalid_ports, "duplicate port assignment");
            g.adjacency[u][pu] = {v, pv};
            g.adjacency[v][pv] = {u, pu};
        }
        for (NodeId v = 0; v < node_count; ++v)
            for (Port p = 0; p < g.degree(v); ++p)
                if (g.adjacency[v][p].neighbor == -1)
                    fail(Errc::invalid_ports, "port gap at node " + std::to_string(v));
    }
    detail::validate_ports(g);
    return g;
}

enum class Family { path, cycle, star, complete, random_connected_gnp };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::path: return "path";
        case Family::cycle: return "cycle";
        case Family::star: return "star";
        case Family::complete: return "complete";
        case Family::random_connected_gnp: return "gnp";
    }
    return "?";
}

// Deterministic generators. For gnp, resample with an incremented sub-seed
// until connected (bounded attempts).
inline PortLabeledGraph generate(Family family, int n, double p = 0.0, std::uint64_t seed = 0) {
    if (n < 1) fail(Errc::empty_graph, "n must be >= 1");
    std::vector<std::pair<NodeId, NodeId>> edges;
    switch (family) {
        case Family::path:
            for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
            break;
        case Family::cycle:
            if (n < 3) fail(Errc::invalid_edge, "cycle needs n >= 3");
            for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
            edges.emplace_back(0, n - 1);
            break;
        case Family::star:
            for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
            break;
        case Family::complete:
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
            break;
        case Family::random_connected_gnp: {
            const int max_attempts = 10000;
            for (int attempt = 0; attempt < max_attempts; ++attempt) {
                Rng rng(seed * 0x9e3779b9ULL + static_cast<std::uint64_t>(attempt));
                edges.clear();
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j)
                        if (rng.real() < p) edges.emplace_back(i, j);
                if (detail::connected(n, edges)) return build_graph(n, edges);
            }
            fail(Errc::disconnected_graph, "gnp never produced a connected graph");
        }
    }
    return build_graph(n, edges);
}

// ---------------------------------------------------------------------------
// Graph file format: line 1 "n m", then m lines "u v [pu pv [w]]".
// Presence of the weight column switches the MST to external-weight mode.

inline std::string write_graph_text(const PortLabeledGraph& g) {
    std::string out = std::to_string(g.node_count) + " " + std::to_string(g.edge_count()) + "\n";
    for (NodeId v = 0; v < g.node_count; ++v)
        for (Port p = 0; p < g.degree(v); ++p) {
            auto [u, q] = g.adjacency[v][p];
            if (v < u) {
                out += std::to_string(v) + " " + std::to_string(u) + " " + std::to_string(p) +
                       " " + std::to_string(q);
                if (g.weighted()) out += " " + std::to_string(g.ext_weights[v][p]);
                out += "\n";
            }
        }
    return out;
}

inline PortLabeledGraph parse_graph_text(const std::string& text) {
    std::vector<std::vector<std::int64_t>> tokens_per_line;
    {
        std::vector<std::int64_t> cur;
        std::int64_t val = 0;
        bool in_num = false, neg = false, any = false;
        auto flush_num = [&] {
            if (in_num) {
                cur.push_back(neg ? -val : val);
                val = 0;
                in_num = neg = false;
            }
        };
        auto flush_line = [&] {
            flush_num();
            if (!cur.empty()) {
                tokens_per_line.push_back(cur);
                cur.clear();
                any = true;
            }
        };
        for (char c : text) {
            if (c >= '0' && c <= '9') {
                val = val * 10 + (c - '0');
                in_num = true;
            } else if (c == '-' && !in_num) {
                neg = true;
                in_num = true;
            } else if (c == '\n') {
                flush_line();
            } else if (c == ' ' || c == '\t' || c == '\r') {
                flush_num();
            } else {
                fail(Errc::io_error, "unexpected character in graph file");
            }
        }
        flush_line();
        if (!any) fail(Errc::io_error, "empty graph file");
    }

    const auto& header = tokens_per_line[0];
    if (header.size() != 2) fail(Errc::io_error, "header must be 'n m'");
    int n = static_cast<int>(header[0]);
    int m = static_cast<int>(header[1]);
    if (static_cast<int>(tokens_per_line.size()) != m + 1) fail(Errc::io_error, "edge count mismatch");

    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<std::pair<Port, Port>> ports;
    std::vector<std::int64_t> weights;
    bool has_ports = false, has_weights = false;
    for (int i = 1; i <= m; ++i) {
        const auto& t = tokens_per_line[i];
        if (i == 1) {
            has_ports = t.size() >= 4;
            has_weights = t.size() == 3 || t.size() == 5;
        }
        std::size_t expect = 2 + (has_ports ? 2 : 0) + (has_weights ? 1 : 0);
        if (t.size() != expect) fail(Errc::io_error, "inconsistent edge line width");
        edges.emplace_back(static_cast<int>(t[0]), static_cast<int>(t[1]));
        if (has_ports) ports.emplace_back(static_cast<int>(t[2]), static_cast<int>(t[3]));
        if (has_weights) weights.push_back(t.back());
    }

    PortLabeledGraph g = has_ports ? build_graph(n, edges, PortRule::explicit_map(ports))
                                   : build_graph(n, edges);
    if (has_weights) {
        std::set<std::int64_t> distinct(weights.begin(), weights.end());
        if (distinct.size() != weights.size())
            fail(Errc::duplicate_weight, "external weights must be distinct");
        for (std::int64_t w : weights)
            if (w <= 0) fail(Errc::duplicate_weight, "external weights must be positive");
        g.ext_weights.resize(n);
        for (NodeId v = 0; v < n; ++v) g.ext_weights[v].resize(g.degree(v), 0);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            auto [u, v] = edges[i];
            // Find the ports for this edge (explicit if given, else look up).
            Port pu, pv;
            if (has_ports) {
                pu = ports[i].first;
                pv = ports[i].second;
            } else {
                pu = pv = -1;
                for (Port p = 0; p < g.degree(u); ++p)
                    if (g.adjacency[u][p].neighbor == v) {
                        pu = p;
                        pv = g.adjacency[u][p].reverse_port;
                    }
            }
            g.ext_weights[u][pu] = weights[i];
            g.ext_weights[v][pv] = weights[i];
        }
    }
    return g;
}

}  // namespace agentnet

#endif
