#ifndef AGENTNET_ORACLE_HPP
#define AGENTNET_ORACLE_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "agentnet/graph.hpp"
#include "agentnet/weights.hpp"

namespace agentnet {
namespace oracle {

// Reference implementations with global graph knowledge. Used only by tests
// and the verify command; protocol code never touches this namespace.

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[a] = b;
        return true;
    }

private:
    std::vector<int> parent_;
};

struct OracleEdge {
    NodeId u, v;
    WeightKey key;
};

inline std::vector<OracleEdge> weighted_edges(const PortLabeledGraph& g, const std::vector<int>& ids) {
    std::vector<OracleEdge> out;
    for (NodeId v = 0; v < g.node_count; ++v)
        for (Port p = 0; p < g.degree(v); ++p)
            if (v < g.adjacency[v][p].neighbor)
                out.push_back({v, g.adjacency[v][p].neighbor, edge_weight_in_graph(g, ids, v, p)});
    return out;
}

// The unique MST under WeightKey order, as a sorted set of node pairs (u < v).
inline std::set<std::pair<NodeId, NodeId>> kruskal_virtual(const PortLabeledGraph& g,
                                                           const std::vector<int>& ids) {
    std::vector<OracleEdge> edges = weighted_edges(g, ids);
    std::stable_sort(edges.begin(), edges.end(),
                     [](const OracleEdge& a, const OracleEdge& b) { return a.key < b.key; });
    UnionFind uf(g.node_count);
    std::set<std::pair<NodeId, NodeId>> tree;
    for (const auto& e : edges)
        if (uf.unite(e.u, e.v)) tree.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
    return tree;
}

// Standard queue BFS distances from root.
inline std::vector<int> classical_bfs(const PortLabeledGraph& g, NodeId root) {
    std::vector<int> level(g.node_count, -1);
    std::deque<NodeId> q{root};
    level[root] = 0;
    while (!q.empty()) {
        NodeId v = q.front();
        q.pop_front();
        for (const auto& e : g.adjacency[v])
            if (level[e.neighbor] < 0) {
                level[e.neighbor] = level[v] + 1;
                q.push_back(e.neighbor);
            }
    }
    return level;
}

inline int diameter(const PortLabeledGraph& g) {
    int d = 0;
    for (NodeId v = 0; v < g.node_count; ++v) {
        auto lv = classical_bfs(g, v);
        for (int l : lv) d = std::max(d, l);
    }
    return d;
}

// All connected simple labeled graphs on 1..n_max nodes, canonical ports,
// identity ID assignment. Raw labeled enumeration; n_max <= 6.
inline std::vector<PortLabeledGraph> enumerate_small(int n_max) {
    if (n_max > 6) fail(Errc::too_large, "enumerate_small supports n_max <= 6");
    std::vector<PortLabeledGraph> out;
    for (int n = 1; n <= n_max; ++n) {
        std::vector<std::pair<NodeId, NodeId>> all_pairs;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) all_pairs.emplace_back(i, j);
        std::uint64_t combos = 1ULL << all_pairs.size();
        for (std::uint64_t mask = 0; mask < combos; ++mask) {
            std::vector<std::pair<NodeId, NodeId>> edges;
            for (std::size_t b = 0; b < all_pairs.size(); ++b)
                if ((mask >> b) & 1) edges.push_back(all_pairs[b]);
            if (!detail::connected(n, edges)) continue;
            out.push_back(build_graph(n, edges));
        }
    }
    return out;
}

// Exact fraction on __int128, enough for summing a few thousand edge weights
// base + 1/(port+2). Used by oracle self-consistency tests only.
struct Frac {
    __int128 num = 0;
    __int128 den = 1;

    static __int128 gcd(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }
    void add(std::int64_t whole, std::int64_t inv_den) {
        // += whole + 1/inv_den  (inv_den >= 1)
        __int128 n2 = num * inv_den + (static_cast<__int128>(whole) * inv_den + 1) * den;
        __int128 d2 = den * inv_den;
        __int128 g = gcd(n2, d2);
        if (g > 1) {
            n2 /= g;
            d2 /= g;
        }
        num = n2;
        den = d2;
    }
    // <
    friend bool operator<(const Frac& a, const Frac& b) { return a.num * b.den < b.num * a.den; }
    friend bool operator==(const Frac& a, const Frac& b) { return a.num * b.den == b.num * a.den; }
};

inline Frac key_sum(const std::vector<WeightKey>& keys) {
    Frac f;
    for (const auto& k : keys) {
        if (k.kind == WeightKey::external)
            f.add(k.base_id - 1, 1);  // += (w-1) + 1/1 = w
        else
            f.add(k.base_id, k.port + 2);
    }
    return f;
}

}  // namespace oracle
}  // namespace agentnet

#endif
