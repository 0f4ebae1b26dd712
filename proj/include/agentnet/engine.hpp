#ifndef AGENTNET_ENGINE_HPP
#define AGENTNET_ENGINE_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "agentnet/common.hpp"
#include "agentnet/graph.hpp"
#include "agentnet/weights.hpp"

namespace agentnet {

// ---------------------------------------------------------------------------
// Agent state. One fixed field set independent of n; every field is O(log λ)
// or O(log Δ) bits wide, audited by state_bits().

enum class MstPhase : std::uint8_t {
    SearchMwoe,
    ReportMin,
    AwaitLeaderMin,
    IdentifyMwoe,
    TryCombine,
    WaitRule3,
    Reorient,
    AggregateParams,
    Done,
};

inline const char* phase_name(MstPhase p) {
    switch (p) {
        case MstPhase::SearchMwoe: return "SearchMwoe";
        case MstPhase::ReportMin: return "ReportMin";
        case MstPhase::AwaitLeaderMin: return "AwaitLeaderMin";
        case MstPhase::IdentifyMwoe: return "IdentifyMwoe";
        case MstPhase::TryCombine: return "TryCombine";
        case MstPhase::WaitRule3: return "WaitRule3";
        case MstPhase::Reorient: return "Reorient";
        case MstPhase::AggregateParams: return "AggregateParams";
        case MstPhase::Done: return "Done";
    }
    return "?";
}

// Directive: the value a fragment leader exposes and children copy downward
// during oscillation visits. dir_stamp orders directives within a fragment.
enum class DirKind : std::uint8_t { None, Start, LeaderMin, Agg, Params, Bfs, Poll, BfsDone };

// Travel task the agent is pursuing inside the current meeting window.
enum class TaskKind : std::uint8_t { None, SweepProbe, CombineSearch, WaveVisit, BfsDeliver };

// What a visitor declares to the resident of the node it is visiting.
enum class ReqKind : std::uint8_t { None, Probe, Combine, WaveReverse, WaveRelabel, Parity, BfsLevel };

// Completion behavior when an agent's reorientation-wave duties finish.
enum class WaveDone : std::uint8_t { None, AckParent, NotifyParent, WinnerStart };

enum class BfsMode : std::uint8_t { None, MLogN, DDelta, Improved };

constexpr Port kNoPort = -1;
constexpr int kNoAgent = -1;

struct AgentState {
    // --- identity ---
    int id = 0;
    std::int64_t lambda = 1;

    int home_degree = 0;  // degree of the agent's home node (local knowledge)

    // --- engine-managed mobility metadata ---
    // Port through which the agent last entered its current node; part of the
    // agent's exchangeable memory (it can always recognize its entry port).
    Port last_entry_port = kNoPort;
    bool away = false;  // true while visiting a foreign node

    // --- fragment structure ---
    MstPhase phase = MstPhase::SearchMwoe;
    int treelabel = 0;
    int treelevel = 0;
    bool is_leader = true;
    Port parent_port = kNoPort;
    Port child_port = kNoPort;    // newest child (chain head)
    Port sibling_port = kNoPort;  // parent's port to my next sibling
    int child_count = 0;
    int depth = 0;  // distance to fragment root; drives oscillation parity

    // --- stage (one MWOE search/selection cycle) ---
    int seq = 0;  // stage sequence number within the current (label, level)
    WeightKey min_weight{};  // own outgoing minimum, this stage
    bool min_weight_set = false;
    WeightKey min_local{};  // folded minimum delivered upward
    bool min_local_set = false;
    WeightKey leader_min{};  // accepted fragment minimum
    bool leader_min_set = false;
    Port mwoe_port = kNoPort;
    bool sweep_done = false;
    Port sweep_cursor = 0;
    bool reported = false;  // my subtree's report has gone up (stage closed here)
    int reports_rcvd = 0;
    WeightKey acc_min{};  // fold of children's reports
    bool acc_min_set = false;
    bool pending_report = false;      // min_local awaiting delivery to parent
    bool pending_notify = false;      // structure-changed signal climbing to leader
    bool pending_resolution = false;  // combine-failed signal climbing to leader
    bool pending_ack = false;         // wave ack awaiting delivery to parent
    bool combine_outstanding = false; // leader: LeaderMin issued, unresolved

    // --- directive exposure (doubles as last-accepted) ---
    DirKind dir_kind = DirKind::None;
    int dir_stamp = -1;  // issue counter, monotone per fragment epoch
    int dir_seq = 0;     // stage tag carried by Start/LeaderMin/Agg
    WeightKey dir_key{};
    bool dir_key_set = false;
    int dir_n = 0, dir_m = 0, dir_delta = 0;  // Params payload
    std::int64_t dir_round = -1;              // Bfs payload: segment start round
    BfsMode dir_bfs_mode = BfsMode::None;

    // --- travel ---
    TaskKind task = TaskKind::None;
    Port task_port = kNoPort;
    bool task_done = false;  // completed within the current window
    ReqKind req_kind = ReqKind::None;
    Port req_sib = kNoPort;       // reversal payload: my old slot in the target's chain
    Port wave_saved_sib = kNoPort;  // saved old sibling_port before re-linking
    WeightKey task_key{};           // home-read edge weight (external-weight mode)
    bool task_key_set = false;

    // --- reorientation wave ---
    bool wave_active = false;
    Port wave_old_parent = kNoPort;  // reversal target (old parent), kNoPort if none/done
    bool wave_reversed = false;      // reversal instruction delivered
    Port wave_walk_next = kNoPort;   // next old child to relabel (chain walk)
    Port wave_gone = kNoPort;        // chain splice: stale pointer value ...
    Port wave_gone_to = kNoPort;     // ... and its replacement
    int acks_expected = 0;
    int acks_rcvd = 0;
    WaveDone wave_done_action = WaveDone::None;

    // --- aggregation / polls (accumulators reused) ---
    std::int64_t acc_cnt = 0, acc_deg = 0, acc_max = 0;
    int agg_rcvd = 0;
    bool pending_agg = false;
    bool agg_sent = false;  // reply for the current tag already queued/delivered
    int agg_tag = -1;  // stage seq (Agg) or poll stamp (Poll) the accs belong to

    // --- graph parameters learned via aggregation ---
    int params_n = 0, params_m = 0, params_delta = 0;
    bool params_set = false;

    // --- BFS ---
    int level = -1;  // -1 = ⊥
    Port bfs_parent_port = kNoPort;
    BfsMode bfs_mode = BfsMode::None;
    std::int64_t bfs_start = -1;  // segment start round (switch arithmetic is local)
    Port bfs_cursor = 0;
    bool bfs_frozen = false;
    int bfs_cand_level = -1;  // best delivery this window/phase
    int bfs_cand_id = kNoAgent;
    Port bfs_cand_port = kNoPort;
    bool bfs_root = false;
    bool bfs_root_done = false;  // root confirmed completion (DDelta detection)

    // --- audit metadata (engine-owned, not agent memory) ---
    std::uint8_t port_bits = 1;  // ⌈log₂ Δ⌉ for the current graph

    int L() const { return bit_length_for_lambda(lambda); }
};

// Memory audit: sum of declared field widths. ID-valued fields cost L bits,
// port-valued fields ⌈log₂Δ⌉ (+1 flag bit when optional), counters bounded by
// n cost L bits (n ≤ λ+1 since IDs are distinct in [0, λ]), round-valued
// counters cost 2L+6 bits, enum tags 4 bits, booleans 1 bit.
inline int state_bits(const AgentState& s) {
    const int L = s.L();
    const int P = s.port_bits;
    const int idf = L;           // id-valued
    const int opt_id = L + 1;    // optional id-valued
    const int prt = P + 1;       // optional port-valued
    const int ctr = L + 1;       // small counter (≤ n)
    const int rnd = 2 * L + 6;   // round/window-valued
    const int key = L + P + 2;   // WeightKey: base id + port + kind + flag
    const int tag = 4;           // enum tag

    int bits = 0;
    bits += idf;           // id
    bits += L;             // lambda
    bits += prt;           // home_degree
    bits += prt;           // last_entry_port
    bits += 1;             // away
    bits += tag;           // phase
    bits += idf;           // treelabel
    bits += ctr;           // treelevel
    bits += 1;             // is_leader
    bits += 3 * prt;       // parent/child/sibling ports
    bits += ctr;           // child_count
    bits += ctr;           // depth
    bits += ctr;           // seq
    bits += 3 * key;       // min_weight, min_local, leader_min
    bits += prt;           // mwoe_port
    bits += 1 + prt;       // sweep_done, sweep_cursor
    bits += 1;             // reported
    bits += ctr;           // reports_rcvd
    bits += key;           // acc_min
    bits += 5;             // pending_report/notify/resolution/ack, combine_outstanding
    bits += tag + ctr + ctr;  // dir_kind, dir_stamp, dir_seq
    bits += key;           // dir_key
    bits += 3 * ctr;       // dir_n, dir_m², dir_delta -- m ≤ n² fits 2 counters
    bits += ctr;           //   (second half of dir_m width)
    bits += rnd;           // dir_round
    bits += tag;           // dir_bfs_mode
    bits += tag + prt + 1; // task, task_port, task_done
    bits += tag;           // req_kind
    bits += 2 * prt;       // req_sib, wave_saved_sib
    bits += key + 1;       // task_key, task_key_set
    bits += 1;             // wave_active
    bits += prt + 1;       // wave_old_parent, wave_reversed
    bits += 3 * prt;       // wave_walk_next, wave_gone, wave_gone_to
    bits += 2 * ctr;       // acks_expected, acks_rcvd
    bits += tag;           // wave_done_action
    bits += 3 * (2 * ctr); // acc_cnt, acc_deg, acc_max (degree sums ≤ n²)
    bits += ctr;           // agg_rcvd
    bits += 2 + ctr;       // pending_agg, agg_sent, agg_tag
    bits += 4 * ctr;       // params_n, params_m (double width), params_delta
    bits += 1;             // params_set
    bits += opt_id;        // level (≤ n)
    bits += prt;           // bfs_parent_port
    bits += tag;           // bfs_mode
    bits += rnd;           // bfs_start
    bits += prt;           // bfs_cursor
    bits += 1;             // bfs_frozen
    bits += opt_id + opt_id + prt;  // bfs_cand level/id/port
    bits += 2;             // bfs_root, bfs_root_done
    return bits;
}

// ---------------------------------------------------------------------------

struct Configuration {
    const PortLabeledGraph* graph = nullptr;
    std::vector<NodeId> placement;  // agent index -> node
    std::vector<AgentState> states;
    std::int64_t round = 0;

    int n_agents() const { return static_cast<int>(states.size()); }
};

struct TraceEvent {
    std::int64_t round;
    int agent;
    NodeId node;
    // kind ordering within a round: move < meet < state_change < merge < absorb < terminate
    enum Kind : std::uint8_t { move, meet, state_change, merge, absorb, terminate } kind;
    std::string detail;
};

inline const char* trace_kind_name(TraceEvent::Kind k) {
    switch (k) {
        case TraceEvent::move: return "move";
        case TraceEvent::meet: return "meet";
        case TraceEvent::state_change: return "state_change";
        case TraceEvent::merge: return "merge";
        case TraceEvent::absorb: return "absorb";
        case TraceEvent::terminate: return "terminate";
    }
    return "?";
}

struct RunMetrics {
    std::int64_t total_rounds = 0;
    std::int64_t total_moves = 0;
    int peak_state_bits = 0;
    std::map<std::string, std::int64_t> phase_round_breakdown;
};

// What a transition sees: its own state, the co-location snapshot (all agents
// at the same node at round start, itself excluded, ordered by ID), the node
// degree, per-port external weights when present, and its entry port.
struct AgentView {
    const AgentState* self;
    const std::vector<const AgentState*>* colocated;
    int degree;
    const std::vector<std::int64_t>* port_weights;  // nullptr unless weighted input
    Port entry_port;
    std::int64_t round;
};

struct StepResult {
    bool move = false;
    Port port = kNoPort;
    AgentState next;
    std::vector<std::pair<TraceEvent::Kind, std::string>> events;
};

class Protocol {
public:
    virtual ~Protocol() = default;
    // Must be a pure function of the view (no hidden mutable state).
    virtual StepResult step(const AgentView& view) const = 0;
};

// Receives every trace event in deterministic order; may store, hash or both.
class TraceRecorder {
public:
    explicit TraceRecorder(bool store) : store_(store) {}

    void record(TraceEvent ev) {
        hash_.feed_int(ev.round);
        hash_.feed_int(ev.agent);
        hash_.feed_int(ev.node);
        hash_.feed_int(static_cast<int>(ev.kind));
        hash_.feed(ev.detail);
        if (store_) events_.push_back(std::move(ev));
    }

    std::uint64_t hash() const { return hash_.value(); }
    const std::vector<TraceEvent>& events() const { return events_; }

private:
    bool store_;
    Fnv1a hash_;
    std::vector<TraceEvent> events_;
};

enum class IdAssignment { identity, seeded_permutation };
enum class LambdaPolicy { max_id, explicit_value };

// Explicit per-node IDs (ids[v] = ID of the agent starting on node v).
inline Configuration init_dispersed_ids(const PortLabeledGraph& g, const std::vector<int>& ids,
                                        LambdaPolicy lp = LambdaPolicy::max_id,
                                        std::int64_t explicit_lambda = -1) {
    int n = g.node_count;
    if (static_cast<int>(ids.size()) != n) fail(Errc::duplicate_id, "one ID per node required");
    std::int64_t max_id = 0;
    {
        std::vector<int> sorted = ids;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 1; i < n; ++i)
            if (sorted[i] == sorted[i - 1]) fail(Errc::duplicate_id, "agent IDs must be distinct");
        if (sorted.front() < 0) fail(Errc::invalid_id, "negative agent ID");
        max_id = sorted.back();
    }
    std::int64_t lambda = (lp == LambdaPolicy::max_id) ? std::max<std::int64_t>(1, max_id)
                                                       : explicit_lambda;
    if (lambda < max_id) fail(Errc::invalid_lambda, "lambda smaller than max agent ID");

    Configuration c;
    c.graph = &g;
    c.placement.resize(n);
    c.states.resize(n);
    int pbits = ceil_log2(std::max(2, g.max_degree()));
    for (NodeId v = 0; v < n; ++v) {
        c.placement[v] = v;  // agent index == start node
        AgentState& s = c.states[v];
        s.id = ids[v];
        s.lambda = lambda;
        s.treelabel = ids[v];
        s.home_degree = g.degree(v);
        s.port_bits = static_cast<std::uint8_t>(pbits);
    }
    return c;
}

// One agent per node. Under identity assignment, agent with ID i starts on
// node i; a seeded permutation shuffles IDs across nodes deterministically.
inline Configuration init_dispersed(const PortLabeledGraph& g,
                                    IdAssignment assignment = IdAssignment::identity,
                                    std::uint64_t seed = 0,
                                    LambdaPolicy lp = LambdaPolicy::max_id,
                                    std::int64_t explicit_lambda = -1) {
    int n = g.node_count;
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    if (assignment == IdAssignment::seeded_permutation) {
        Rng rng(seed);
        for (int i = n - 1; i > 0; --i) std::swap(ids[i], ids[rng.below(i + 1)]);
    }
    return init_dispersed_ids(g, ids, lp, explicit_lambda);
}

// One synchronous CCM round: snapshot co-location at round start, run every
// agent's pure transition against it, then apply all moves simultaneously.
inline void step_round(Configuration& c, const Protocol& protocol,
                       TraceRecorder* recorder = nullptr, RunMetrics* metrics = nullptr) {
    const PortLabeledGraph& g = *c.graph;
    const int n = c.n_agents();

    // Group agents by node (IDs ascend with agent index order after sorting).
    static thread_local std::vector<std::vector<int>> occupants;
    occupants.assign(g.node_count, {});
    for (int a = 0; a < n; ++a) occupants[c.placement[a]].push_back(a);
    for (auto& occ : occupants)
        std::sort(occ.begin(), occ.end(),
                  [&](int x, int y) { return c.states[x].id < c.states[y].id; });

    std::vector<AgentState> next_states(n);
    std::vector<NodeId> next_placement = c.placement;
    std::vector<std::pair<int, std::pair<TraceEvent::Kind, std::string>>> round_events;
    std::vector<const AgentState*> colocated;

    for (int a = 0; a < n; ++a) {
        NodeId at = c.placement[a];
        colocated.clear();
        for (int b : occupants[at])
            if (b != a) colocated.push_back(&c.states[b]);

        AgentView view;
        view.self = &c.states[a];
        view.colocated = &colocated;
        view.degree = g.degree(at);
        view.port_weights = g.weighted() ? &g.ext_weights[at] : nullptr;
        view.entry_port = c.states[a].last_entry_port;
        view.round = c.round;

        StepResult res = protocol.step(view);
        if (res.move) {
            if (res.port < 0 || res.port >= g.degree(at))
                fail(Errc::protocol_fault, "agent " + std::to_string(c.states[a].id) +
                                               " requested port " + std::to_string(res.port) +
                                               " at degree-" + std::to_string(g.degree(at)) +
                                               " node in round " + std::to_string(c.round));
            auto [to, rev] = neighbor_via_port(g, at, res.port);
            next_placement[a] = to;
            res.next.last_entry_port = rev;
            if (metrics) ++metrics->total_moves;
            if (recorder)
                round_events.push_back({a, {TraceEvent::move, "p" + std::to_string(res.port)}});
        }
        next_states[a] = std::move(res.next);
        for (auto& ev : res.events) round_events.push_back({a, std::move(ev)});
    }

    if (recorder) {
        std::stable_sort(round_events.begin(), round_events.end(),
                         [&](const auto& x, const auto& y) {
                             if (x.second.first != y.second.first)
                                 return x.second.first < y.second.first;
                             return c.states[x.first].id < c.states[y.first].id;
                         });
        for (auto& [a, ev] : round_events)
            recorder->record({c.round, c.states[a].id, c.placement[a], ev.first, ev.second});
    }

    c.states = std::move(next_states);
    c.placement = std::move(next_placement);
    ++c.round;

    if (metrics) {
        for (int a = 0; a < n; ++a)
            metrics->peak_state_bits = std::max(metrics->peak_state_bits, state_bits(c.states[a]));
        // Phase accounting: attribute the round to the most common phase
        // (ties to the smaller ordinal).
        int counts[16] = {0};
        for (int a = 0; a < n; ++a) ++counts[static_cast<int>(c.states[a].phase)];
        int best = 0;
        for (int p = 1; p < 16; ++p)
            if (counts[p] > counts[best]) best = p;
        ++metrics->phase_round_breakdown[phase_name(static_cast<MstPhase>(best))];
    }
}

class TimeoutError : public SimError {
public:
    TimeoutError(std::string what, RunMetrics partial)
        : SimError(Errc::timeout_exceeded, std::move(what)), metrics(std::move(partial)) {}
    RunMetrics metrics;
};

// Run until the stop predicate holds (checked before each round) or until
// max_rounds, which is an error, not silent truncation.
inline std::pair<RunMetrics, TraceRecorder> run_until(
    Configuration& c, const Protocol& protocol,
    const std::function<bool(const Configuration&)>& stop, std::int64_t max_rounds,
    bool store_trace = true) {
    if (max_rounds <= 0) fail(Errc::bad_config, "max_rounds must be positive");
    RunMetrics metrics;
    TraceRecorder recorder(store_trace);
    std::int64_t start = c.round;
    while (!stop(c)) {
        if (c.round - start >= max_rounds) {
            metrics.total_rounds = c.round - start;
            throw TimeoutError("no termination within " + std::to_string(max_rounds) + " rounds",
                               metrics);
        }
        step_round(c, protocol, &recorder, &metrics);
    }
    metrics.total_rounds = c.round - start;
    return {std::move(metrics), std::move(recorder)};
}

}  // namespace agentnet

#endif
