#ifndef AGENTNET_WEIGHTS_HPP
#define AGENTNET_WEIGHTS_HPP

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "agentnet/common.hpp"
#include "agentnet/graph.hpp"

namespace agentnet {

// Deterministic distinct virtual edge weight: the exact rational
// base_id + 1/(port+2), where base_id is the smaller endpoint agent ID and
// port is that endpoint's port across the edge. Never stored by agents;
// recomputed from meeting data. When the input graph carries explicit
// integer weights, the external variant is used instead and ordering is
// plain integer order.
struct WeightKey {
    enum Kind : std::uint8_t { virtual_key, external } kind = virtual_key;
    std::int64_t base_id = 0;  // smaller endpoint ID, or the external weight
    Port port = 0;             // port at the min-ID endpoint (virtual only)

    static WeightKey make_virtual(std::int64_t base, Port p) { return {virtual_key, base, p}; }
    static WeightKey make_external(std::int64_t w) { return {external, w, 0}; }

    friend bool operator==(const WeightKey& a, const WeightKey& b) {
        return a.kind == b.kind && a.base_id == b.base_id && (a.kind == external || a.port == b.port);
    }

    std::string str() const {
        if (kind == external) return std::to_string(base_id);
        return "(" + std::to_string(base_id) + "," + std::to_string(port) + ")";
    }
};

// Exact order: base + 1/(p+2) compares first by base, then by 1/(p+2),
// i.e. larger port means smaller weight.
inline int compare(const WeightKey& a, const WeightKey& b) {
    if (a.base_id != b.base_id) return a.base_id < b.base_id ? -1 : 1;
    if (a.kind == WeightKey::external || b.kind == WeightKey::external) return 0;
    if (a.port != b.port) return a.port > b.port ? -1 : 1;
    return 0;
}

inline bool operator<(const WeightKey& a, const WeightKey& b) { return compare(a, b) < 0; }

// The weight both endpoints compute at a meeting across an edge.
inline WeightKey edge_weight(std::int64_t id_u, std::int64_t id_v, Port port_at_u, Port port_at_v) {
    if (id_u == id_v) fail(Errc::not_distinct, "edge endpoints must carry distinct IDs");
    if (id_u < id_v) return WeightKey::make_virtual(id_u, port_at_u);
    return WeightKey::make_virtual(id_v, port_at_v);
}

// Weight of the edge leaving node u through port p, given per-node agent IDs.
// Honors external weights when present.
inline WeightKey edge_weight_in_graph(const PortLabeledGraph& g, const std::vector<int>& ids,
                                      NodeId u, Port p) {
    if (g.weighted()) return WeightKey::make_external(g.ext_weights[u][p]);
    auto [v, q] = neighbor_via_port(g, u, p);
    return edge_weight(ids[u], ids[v], p, q);
}

// Test oracle: true iff all m edge weights are pairwise distinct. Always true
// for virtual weights (distinctness lemma); a structural check, not a guard.
inline bool all_weights_distinct(const PortLabeledGraph& g, const std::vector<int>& ids) {
    std::vector<WeightKey> keys;
    for (NodeId v = 0; v < g.node_count; ++v)
        for (Port p = 0; p < g.degree(v); ++p)
            if (v < g.adjacency[v][p].neighbor) keys.push_back(edge_weight_in_graph(g, ids, v, p));
    for (std::size_t i = 0; i < keys.size(); ++i)
        for (std::size_t j = i + 1; j < keys.size(); ++j)
            if (keys[i] == keys[j]) return false;
    return true;
}

}  // namespace agentnet

#endif
