#ifndef AGENTNET_MST_HPP
#define AGENTNET_MST_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "agentnet/engine.hpp"
#include "agentnet/meeting.hpp"
#include "agentnet/weights.hpp"

namespace agentnet {

enum class Algorithm { mst, leader, bfs, bfs_mlogn, bfs_ddelta };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::mst: return "mst";
        case Algorithm::leader: return "leader";
        case Algorithm::bfs: return "bfs";
        case Algorithm::bfs_mlogn: return "bfs-mlogn";
        case Algorithm::bfs_ddelta: return "bfs-ddelta";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Fragment-growing MST over meeting windows, followed (optionally) by a BFS
// segment rooted at the elected leader.
//
// Global rhythm during the MST segment: super-periods of 4L+2 rounds. The
// first 4L rounds form one meeting window in which an agent pursues at most
// one travel task (probe one port, attempt one combine, deliver one wave
// instruction), going out only on the 1-bits of its own new_id schedule so
// that co-location guarantees hold for every pair of neighbors. The two
// reserved rounds carry parent/child oscillation: each non-leader visits its
// parent every second super-period (odd depths in even periods, even depths
// in odd ones, so the parent - whose depth parity is opposite - is home),
// delivering reports, acknowledgements and notifications upward and copying
// the newest leader directive downward.
//
// Fragments carry (treelabel, treelevel) tags; treelabel is the leader's ID,
// so tag equality identifies a fragment. Stages are serialized per fragment
// by a sequence number: the leader never starts a new MWOE search while a
// combine it ordered is unresolved, and every structure change (an absorbed
// subtree finishing its re-orientation, or a failed combine) climbs to the
// leader as a sticky notification that triggers a restart with seq+1.

class TreeProtocol : public Protocol {
public:
    explicit TreeProtocol(Algorithm algo) : algo_(algo) {}

    StepResult step(const AgentView& view) const override {
        AgentState s = *view.self;
        StepResult out;
        const std::int64_t r = view.round;

        if (s.bfs_start >= 0 && r >= s.bfs_start) {
            bfs_step(s, view, out);
        } else {
            mst_step(s, view, out);
        }
        out.next = std::move(s);
        return out;
    }

private:
    Algorithm algo_;

    // ---- small helpers -----------------------------------------------------

    static bool tags_match(const AgentState& a, const AgentState& b) {
        return a.treelabel == b.treelabel && a.treelevel == b.treelevel;
    }

    // Edge weight both parties compute at a visitor->resident meeting.
    static WeightKey meeting_edge_key(const AgentState& visitor, const AgentState& resident) {
        if (visitor.task_key_set) return visitor.task_key;
        return edge_weight(visitor.id, resident.id, visitor.task_port, visitor.last_entry_port);
    }

    static void fold_key(WeightKey& slot, bool& set, const WeightKey& k) {
        if (!set || k < slot) {
            slot = k;
            set = true;
        }
    }

    static void issue(AgentState& s, DirKind kind) {
        s.dir_kind = kind;
        s.dir_stamp = s.dir_stamp + 1;
        s.dir_seq = s.seq;
    }

    static void reset_stage_fields(AgentState& s) {
        s.min_weight_set = s.min_local_set = s.leader_min_set = false;
        s.acc_min_set = false;
        s.mwoe_port = kNoPort;
        s.sweep_done = false;
        s.sweep_cursor = 0;
        s.reported = false;
        s.reports_rcvd = 0;
        s.pending_report = false;
    }

    static void join_stage(AgentState& s, int seq) {
        s.seq = seq;
        reset_stage_fields(s);
        s.sweep_done = (s.home_degree == 0);
        s.phase = MstPhase::SearchMwoe;
    }

    static void closed_stage(AgentState& s, int seq) {
        s.seq = seq;
        reset_stage_fields(s);
        s.sweep_done = true;
        s.reported = true;
        s.phase = MstPhase::AwaitLeaderMin;
    }

    // Entering another fragment (absorb/merge loser/wave instruction): drop
    // everything belonging to the old fragment epoch.
    static void enter_fragment(AgentState& s, int label, int level, int depth) {
        s.treelabel = label;
        s.treelevel = level;
        s.depth = depth;
        s.is_leader = false;
        s.dir_kind = DirKind::None;
        s.dir_stamp = -1;
        s.seq = 0;
        reset_stage_fields(s);
        s.pending_report = s.pending_notify = s.pending_resolution = s.pending_ack = false;
        s.pending_agg = false;
        s.combine_outstanding = false;
        s.task = TaskKind::None;
        s.task_done = false;
        s.phase = MstPhase::Reorient;
    }

    static void start_wave(AgentState& s, Port old_parent, Port walk_head, WaveDone done,
                           int preset_acks) {
        s.wave_active = true;
        s.wave_old_parent = old_parent;
        s.wave_reversed = (old_parent == kNoPort);
        s.wave_walk_next = walk_head;
        s.wave_gone = s.wave_gone_to = kNoPort;
        s.acks_expected = preset_acks;
        s.acks_rcvd = 0;
        s.wave_done_action = done;
    }

    // ---- combine decision (evaluated identically by both endpoints) --------

    enum class Outcome { Ignore, FailInternal, Absorb, Merge, Wait };

    static Outcome decide_combine(const AgentState& a, const AgentState& x) {
        if (!a.leader_min_set) return Outcome::Ignore;
        WeightKey key = meeting_edge_key(a, x);
        if (!(key == a.leader_min)) return Outcome::Ignore;
        if (a.treelabel == x.treelabel)
            return a.treelevel == x.treelevel ? Outcome::FailInternal : Outcome::Wait;
        if (a.treelevel < x.treelevel) return Outcome::Absorb;
        if (a.treelevel == x.treelevel && x.leader_min_set && x.leader_min == key &&
            x.mwoe_port == a.last_entry_port &&
            (x.phase == MstPhase::TryCombine || x.phase == MstPhase::WaitRule3))
            return Outcome::Merge;
        return Outcome::Wait;
    }

    // Mutating-request arbitration: at most one visitor may modify the
    // resident per round. Wave instructions outrank combines; ties go to the
    // smaller requester ID. Everyone at the node computes the same winner.
    static int mutator_rank(const AgentState& a, const AgentState& x) {
        if (!a.away) return -1;
        switch (a.req_kind) {
            case ReqKind::WaveReverse:
                return tags_match(a, x) ? -1 : 0;
            case ReqKind::WaveRelabel:
                return (!tags_match(a, x) && a.last_entry_port == x.parent_port) ? 1 : -1;
            case ReqKind::Combine: {
                Outcome o = decide_combine(a, x);
                return (o == Outcome::Absorb || o == Outcome::Merge) ? 2 : -1;
            }
            default:
                return -1;
        }
    }

    static int winning_mutator(const AgentState& x, const std::vector<const AgentState*>& all,
                               const AgentState* extra) {
        int best_id = kNoAgent, best_rank = 99;
        auto consider = [&](const AgentState& a) {
            int rk = mutator_rank(a, x);
            if (rk < 0) return;
            if (rk < best_rank || (rk == best_rank && a.id < best_id)) {
                best_rank = rk;
                best_id = a.id;
            }
        };
        for (const AgentState* a : all) consider(*a);
        if (extra) consider(*extra);
        return best_id;
    }

    // ---- directives ---------------------------------------------------------

    static void accept_directive(AgentState& s, const AgentState& from,
                                 std::vector<std::pair<TraceEvent::Kind, std::string>>& events) {
        s.dir_kind = from.dir_kind;
        s.dir_stamp = from.dir_stamp;
        s.dir_seq = from.dir_seq;
        s.dir_key = from.dir_key;
        s.dir_key_set = from.dir_key_set;
        s.dir_n = from.dir_n;
        s.dir_m = from.dir_m;
        s.dir_delta = from.dir_delta;
        s.dir_round = from.dir_round;
        s.dir_bfs_mode = from.dir_bfs_mode;
        switch (from.dir_kind) {
            case DirKind::Start:
                if (from.reported)
                    closed_stage(s, from.dir_seq);
                else
                    join_stage(s, from.dir_seq);
                break;
            case DirKind::LeaderMin:
                s.leader_min = from.dir_key;
                s.leader_min_set = true;
                if (s.seq == from.dir_seq && s.min_weight_set && s.min_weight == from.dir_key) {
                    s.phase = MstPhase::IdentifyMwoe;
                    s.sweep_cursor = 0;
                    s.mwoe_port = kNoPort;
                } else {
                    s.phase = MstPhase::AwaitLeaderMin;
                }
                break;
            case DirKind::Agg:
                s.agg_tag = from.dir_seq;
                s.agg_sent = false;
                s.acc_cnt = 1;
                s.acc_deg = s.home_degree;
                s.acc_max = s.home_degree;
                s.agg_rcvd = 0;
                s.pending_agg = false;
                s.phase = MstPhase::AggregateParams;
                break;
            case DirKind::Params:
                apply_params(s, events);
                break;
            case DirKind::Bfs:
                apply_params(s, events);
                s.bfs_mode = from.dir_bfs_mode;
                s.bfs_start = from.dir_round;
                break;
            case DirKind::Poll:
                s.agg_tag = from.dir_stamp;
                s.agg_sent = false;
                s.acc_cnt = (s.level >= 0) ? 1 : 0;
                s.acc_deg = s.acc_max = 0;
                s.agg_rcvd = 0;
                s.pending_agg = false;
                break;
            case DirKind::BfsDone:
                s.bfs_frozen = true;
                break;
            case DirKind::None:
                break;
        }
    }

    static void apply_params(AgentState& s,
                             std::vector<std::pair<TraceEvent::Kind, std::string>>& events) {
        if (s.dir_n > 0 && !s.params_set) {
            s.params_n = s.dir_n;
            s.params_m = s.dir_m;
            s.params_delta = s.dir_delta;
            s.params_set = true;
        }
        if (s.phase != MstPhase::Done) {
            s.phase = MstPhase::Done;
            events.push_back({TraceEvent::state_change, "done"});
        }
    }

    // ---- combine execution --------------------------------------------------

    // a (requester, at x's node) joins x's fragment across a.task_port.
    static void absorb_requester_side(AgentState& a, const AgentState& x) {
        Port old_parent = a.parent_port;
        Port walk_head = a.child_port;
        a.wave_saved_sib = a.sibling_port;
        a.sibling_port = x.child_port;
        a.parent_port = a.task_port;
        enter_fragment(a, x.treelabel, x.treelevel, x.depth + 1);
        start_wave(a, old_parent, walk_head, WaveDone::NotifyParent, 0);
    }

    static void absorb_resident_side(AgentState& x, const AgentState& a) {
        x.child_count += 1;
        x.child_port = a.last_entry_port;
    }

    static void merge_sides(AgentState& me, const AgentState& other, Port port_to_other,
                            Port other_port_to_me, bool i_win) {
        int new_level = me.treelevel + 1;
        (void)other_port_to_me;
        if (i_win) {
            Port old_parent = me.parent_port;
            Port walk_head = me.child_port;
            me.wave_saved_sib = me.sibling_port;  // reversal splices me out of the old chain
            me.sibling_port = kNoPort;
            me.is_leader = true;
            me.treelabel = me.id;
            me.treelevel = new_level;
            me.depth = 0;
            me.parent_port = kNoPort;
            me.child_count += 1;
            me.child_port = port_to_other;
            me.dir_kind = DirKind::None;
            me.dir_stamp = -1;
            me.seq = 0;
            reset_stage_fields(me);
            me.pending_report = me.pending_notify = me.pending_resolution = me.pending_ack = false;
            me.pending_agg = false;
            me.combine_outstanding = false;
            me.task = TaskKind::None;
            me.task_done = false;
            me.phase = MstPhase::Reorient;
            start_wave(me, old_parent, walk_head, WaveDone::WinnerStart, 1);
        } else {
            Port old_parent = me.parent_port;
            Port walk_head = me.child_port;
            me.wave_saved_sib = me.sibling_port;
            me.sibling_port = other.child_port;  // loser becomes the winner's chain head
            me.parent_port = port_to_other;
            enter_fragment(me, other.id, new_level, 1);
            start_wave(me, old_parent, walk_head, WaveDone::AckParent, 0);
        }
    }

    // ---- wave instructions --------------------------------------------------

    // Resident x receives a reversal from visitor c (its former child, already
    // re-tagged): x becomes c's child, splices c out of its chain, and takes
    // over wave duties toward its own old parent and remaining children.
    static void wave_reverse_resident(AgentState& x, const AgentState& c) {
        Port port_to_c = c.last_entry_port;
        if (x.child_port == port_to_c)
            x.child_port = c.req_sib;
        else {
            x.wave_gone = port_to_c;
            x.wave_gone_to = c.req_sib;
        }
        x.child_count -= 1;
        Port old_parent = x.parent_port;
        x.wave_saved_sib = x.sibling_port;
        x.sibling_port = c.child_port;  // c prepends me to its chain this round
        x.parent_port = port_to_c;
        Port gone = x.wave_gone, gone_to = x.wave_gone_to;
        enter_fragment(x, c.treelabel, c.treelevel, c.depth + 1);
        start_wave(x, old_parent, x.child_port, WaveDone::AckParent, 0);
        x.wave_gone = gone;
        x.wave_gone_to = gone_to;
    }

    static void wave_reverse_visitor(AgentState& c, const AgentState& x) {
        (void)x;
        c.child_count += 1;
        c.child_port = c.task_port;
        c.acks_expected += 1;
        c.wave_reversed = true;
    }

    static void wave_relabel_resident(AgentState& c, const AgentState& p) {
        if (p.wave_gone != kNoPort && c.sibling_port == p.wave_gone)
            c.sibling_port = p.wave_gone_to;
        Port keep_parent = c.parent_port;
        enter_fragment(c, p.treelabel, p.treelevel, p.depth + 1);
        c.parent_port = keep_parent;
        start_wave(c, kNoPort, c.child_port, WaveDone::AckParent, 0);
    }

    static void wave_relabel_visitor(AgentState& p, const AgentState& c) {
        Port next = c.sibling_port;
        if (p.wave_gone != kNoPort && next == p.wave_gone) {
            next = p.wave_gone_to;
            p.wave_gone = kNoPort;
        }
        p.wave_walk_next = next;
        p.acks_expected += 1;
    }

    // ---- MST segment --------------------------------------------------------

    void mst_step(AgentState& s, const AgentView& view, StepResult& out) const {
        const int L = s.L();
        const int W = 4 * L;
        const int SP = W + 2;
        const std::int64_t r = view.round;
        const int wr = static_cast<int>(r % SP);
        const std::int64_t period = r / SP;

        if (s.away) {
            visitor_interact(s, view, out);
            out.move = true;
            out.port = s.last_entry_port;
            s.away = false;
            s.req_kind = ReqKind::None;
            s.task_key_set = false;
            return;
        }

        resident_process(s, view, out);
        local_progress(s, view, out);

        if (wr == 0) window_init(s, view);

        if (wr < W && wr % 2 == 0 && s.task != TaskKind::None && !s.task_done) {
            MeetingSchedule sched = compute_new_id(s.id, s.lambda);
            if (sched.bit(wr / 2)) depart(s, view, out);
        } else if (wr == W) {
            bool oscillate = !s.is_leader && s.parent_port != kNoPort &&
                             ((s.depth + period) % 2 == 1);
            if (oscillate) {
                s.req_kind = ReqKind::Parity;
                s.away = true;
                out.move = true;
                out.port = s.parent_port;
            }
        }
    }

    void depart(AgentState& s, const AgentView& view, StepResult& out) const {
        switch (s.task) {
            case TaskKind::SweepProbe:
                s.req_kind = ReqKind::Probe;
                break;
            case TaskKind::CombineSearch:
                s.req_kind = ReqKind::Combine;
                break;
            case TaskKind::WaveVisit:
                if (!s.wave_reversed) {
                    s.req_kind = ReqKind::WaveReverse;
                    s.req_sib = s.wave_saved_sib;
                } else {
                    s.req_kind = ReqKind::WaveRelabel;
                }
                break;
            case TaskKind::BfsDeliver:
                s.req_kind = ReqKind::BfsLevel;
                break;
            case TaskKind::None:
                return;
        }
        if (view.port_weights &&
            (s.task == TaskKind::SweepProbe || s.task == TaskKind::CombineSearch)) {
            s.task_key = WeightKey::make_external((*view.port_weights)[s.task_port]);
            s.task_key_set = true;
        }
        s.away = true;
        out.move = true;
        out.port = s.task_port;
    }

    void window_init(AgentState& s, const AgentView& view) const {
        s.task = TaskKind::None;
        s.task_done = false;
        if (s.wave_active) {
            if (!s.wave_reversed && s.wave_old_parent != kNoPort) {
                s.task = TaskKind::WaveVisit;
                s.task_port = s.wave_old_parent;
            } else if (s.wave_walk_next != kNoPort) {
                s.task = TaskKind::WaveVisit;
                s.task_port = s.wave_walk_next;
            }
            return;
        }
        switch (s.phase) {
            case MstPhase::IdentifyMwoe:
                if (s.sweep_cursor >= view.degree) s.sweep_cursor = 0;
                s.task = TaskKind::CombineSearch;
                s.task_port = s.sweep_cursor;
                break;
            case MstPhase::TryCombine:
            case MstPhase::WaitRule3:
                s.task = TaskKind::CombineSearch;
                s.task_port = s.mwoe_port;
                break;
            case MstPhase::SearchMwoe:
                if (!s.sweep_done && view.degree > 0) {
                    s.task = TaskKind::SweepProbe;
                    s.task_port = s.sweep_cursor;
                }
                break;
            default:
                break;
        }
    }

    // Once a subordinate has its own answer and one from every child, queue
    // the reply for the next oscillation visit.
    static void agg_ready_check(AgentState& s) {
        if (s.is_leader || s.agg_sent) return;
        bool in_agg = (s.dir_kind == DirKind::Agg && s.phase == MstPhase::AggregateParams) ||
                      s.dir_kind == DirKind::Poll;
        if (in_agg && s.agg_rcvd >= s.child_count) {
            s.pending_agg = true;
            s.agg_sent = true;
        }
    }

    void local_progress(AgentState& s, const AgentView& view, StepResult& out) const {
        // Wave completion.
        if (s.wave_active && s.wave_reversed && s.wave_walk_next == kNoPort &&
            s.acks_rcvd == s.acks_expected) {
            s.wave_active = false;
            switch (s.wave_done_action) {
                case WaveDone::AckParent:
                    s.pending_ack = true;
                    s.phase = MstPhase::AwaitLeaderMin;
                    break;
                case WaveDone::NotifyParent:
                    s.pending_notify = true;
                    s.phase = MstPhase::AwaitLeaderMin;
                    break;
                case WaveDone::WinnerStart:
                    s.seq = 0;
                    issue(s, DirKind::Start);
                    join_stage(s, 0);
                    break;
                case WaveDone::None:
                    break;
            }
            s.wave_done_action = WaveDone::None;
        }

        if (s.phase == MstPhase::SearchMwoe && s.home_degree == 0) s.sweep_done = true;
        if (s.phase == MstPhase::SearchMwoe && s.sweep_done) s.phase = MstPhase::ReportMin;
        agg_ready_check(s);

        // Identification shortcuts that need no travel.
        if (s.phase == MstPhase::IdentifyMwoe && s.leader_min_set) {
            if (s.leader_min.kind == WeightKey::virtual_key && s.leader_min.base_id == s.id) {
                s.mwoe_port = s.leader_min.port;
                s.phase = MstPhase::TryCombine;
            }
            // External weights: the matching port is in the home table; it was
            // remembered in min_weight's port-free form, so probe via mwoe
            // search only when needed. The local scan happens in window_init's
            // CombineSearch probing (key comparison at the meeting).
        }

        // Subtree report readiness.
        if (!s.is_leader && s.phase == MstPhase::ReportMin && s.reports_rcvd >= s.child_count &&
            !s.reported) {
            s.min_local = s.min_weight;
            s.min_local_set = s.min_weight_set;
            if (s.acc_min_set) fold_key(s.min_local, s.min_local_set, s.acc_min);
            s.reported = true;
            s.pending_report = true;
            s.phase = MstPhase::AwaitLeaderMin;
        }

        if (!s.is_leader) return;

        // Leader: stage resolution bookkeeping.
        if (s.pending_resolution) {
            s.pending_resolution = false;
            s.combine_outstanding = false;
            s.pending_notify = true;  // composition changed; force a restart
        }
        if (s.pending_notify && !s.combine_outstanding &&
            (s.phase == MstPhase::SearchMwoe || s.phase == MstPhase::ReportMin ||
             s.phase == MstPhase::AwaitLeaderMin)) {
            s.pending_notify = false;
            s.seq += 1;
            issue(s, DirKind::Start);
            join_stage(s, s.seq);
            if (s.sweep_done) s.phase = MstPhase::ReportMin;
            return;
        }

        // Leader: end of search -> select fragment minimum or terminate.
        if ((s.phase == MstPhase::SearchMwoe || s.phase == MstPhase::ReportMin) && s.sweep_done &&
            s.reports_rcvd >= s.child_count && !s.reported) {
            s.reported = true;
            WeightKey best{};
            bool best_set = false;
            if (s.min_weight_set) fold_key(best, best_set, s.min_weight);
            if (s.acc_min_set) fold_key(best, best_set, s.acc_min);
            if (!best_set) {
                issue(s, DirKind::Agg);
                s.agg_tag = s.seq;
                s.acc_cnt = 1;
                s.acc_deg = s.home_degree;
                s.acc_max = s.home_degree;
                s.agg_rcvd = 0;
                s.phase = MstPhase::AggregateParams;
            } else {
                s.leader_min = best;
                s.leader_min_set = true;
                s.dir_key = best;
                s.dir_key_set = true;
                issue(s, DirKind::LeaderMin);
                s.combine_outstanding = true;
                if (s.min_weight_set && s.min_weight == best) {
                    s.phase = MstPhase::IdentifyMwoe;
                    s.sweep_cursor = 0;
                    s.mwoe_port = kNoPort;
                } else {
                    s.phase = MstPhase::AwaitLeaderMin;
                }
            }
        }

        // Leader: aggregation complete -> publish parameters (and BFS kickoff).
        if (s.phase == MstPhase::AggregateParams && s.agg_rcvd >= s.child_count &&
            !s.params_set) {
            s.params_n = static_cast<int>(s.acc_cnt);
            s.params_m = static_cast<int>(s.acc_deg / 2);
            s.params_delta = static_cast<int>(s.acc_max);
            s.params_set = true;
            s.dir_n = s.params_n;
            s.dir_m = s.params_m;
            s.dir_delta = s.params_delta;
            out.events.push_back({TraceEvent::terminate,
                                  "n=" + std::to_string(s.params_n) +
                                      " m=" + std::to_string(s.params_m) +
                                      " delta=" + std::to_string(s.params_delta)});
            if (algo_ == Algorithm::mst || algo_ == Algorithm::leader) {
                issue(s, DirKind::Params);
            } else {
                const int L = s.L();
                const std::int64_t SP = 4 * L + 2;
                s.dir_bfs_mode = algo_ == Algorithm::bfs         ? BfsMode::Improved
                                 : algo_ == Algorithm::bfs_mlogn ? BfsMode::MLogN
                                                                 : BfsMode::DDelta;
                // Start far enough out for the directive to flood the tree:
                // one tree level per two super-periods, depth < n.
                s.dir_round = view.round + SP * (2LL * s.params_n + 6);
                issue(s, DirKind::Bfs);
                s.bfs_mode = s.dir_bfs_mode;
                s.bfs_start = s.dir_round;
                s.bfs_root = true;
            }
            s.phase = MstPhase::Done;
            out.events.push_back({TraceEvent::state_change, "done"});
        }
    }

    // ---- visitor/resident interaction (window + reserved rounds) -----------

    void visitor_interact(AgentState& s, const AgentView& view, StepResult& out) const {
        const AgentState* res = nullptr;
        for (const AgentState* a : *view.colocated)
            if (!a->away) res = a;
        if (!res) return;  // target was traveling; retry on a later slot
        const AgentState& x = *res;
        out.events.push_back({TraceEvent::meet, "id=" + std::to_string(x.id)});

        switch (s.req_kind) {
            case ReqKind::Probe: {
                s.task_done = true;
                if (x.treelabel == s.treelabel && x.treelevel == s.treelevel) {
                    advance_sweep(s);
                } else if (x.treelabel == s.treelabel) {
                    // Same fragment mid-retag: retry this port next window.
                } else if (x.treelevel >= s.treelevel) {
                    fold_key(s.min_weight, s.min_weight_set, meeting_edge_key(s, x));
                    advance_sweep(s);
                }
                // Lower level: defer, retry the same port next window.
                break;
            }
            case ReqKind::Combine: {
                s.task_done = true;
                Outcome o = decide_combine(s, x);
                if (o == Outcome::Ignore) {
                    if (s.phase == MstPhase::IdentifyMwoe) s.sweep_cursor += 1;
                    break;
                }
                if (s.phase == MstPhase::IdentifyMwoe) {
                    s.mwoe_port = s.task_port;
                    s.phase = MstPhase::TryCombine;
                }
                if (o == Outcome::FailInternal) {
                    s.pending_resolution = true;
                    s.phase = MstPhase::AwaitLeaderMin;
                    break;
                }
                if (o == Outcome::Wait) {
                    s.phase = MstPhase::WaitRule3;
                    break;
                }
                int winner = winning_mutator(x, *view.colocated, &s);
                if (winner != s.id) {
                    s.phase = MstPhase::WaitRule3;
                    break;
                }
                if (o == Outcome::Absorb) {
                    absorb_requester_side(s, x);
                } else {
                    merge_sides(s, x, s.task_port, s.last_entry_port,
                                /*i_win=*/s.treelabel < x.treelabel);
                }
                break;
            }
            case ReqKind::WaveReverse: {
                s.task_done = true;
                if (tags_match(s, x)) {
                    s.wave_reversed = true;  // degenerate: nothing to instruct
                    break;
                }
                if (winning_mutator(x, *view.colocated, &s) == s.id) wave_reverse_visitor(s, x);
                break;
            }
            case ReqKind::WaveRelabel: {
                s.task_done = true;
                if (tags_match(s, x)) {
                    // Already carried the tag (degenerate); just advance.
                    Port next = x.sibling_port;
                    if (s.wave_gone != kNoPort && next == s.wave_gone) {
                        next = s.wave_gone_to;
                        s.wave_gone = kNoPort;
                    }
                    s.wave_walk_next = next;
                    break;
                }
                if (winning_mutator(x, *view.colocated, &s) == s.id) wave_relabel_visitor(s, x);
                break;
            }
            case ReqKind::Parity: {
                if (tags_match(s, x)) {
                    if (s.pending_ack) s.pending_ack = false;
                    if (s.pending_notify) s.pending_notify = false;
                    if (s.pending_resolution) s.pending_resolution = false;
                    if (s.pending_report && s.seq == x.seq) s.pending_report = false;
                    if (s.pending_agg && s.agg_tag == x.agg_tag) s.pending_agg = false;
                    if (x.dir_stamp > s.dir_stamp && !s.wave_active)
                        accept_directive(s, x, out.events);
                }
                break;
            }
            case ReqKind::BfsLevel:
                s.task_done = true;
                break;
            case ReqKind::None:
                break;
        }
    }

    static void advance_sweep(AgentState& s) {
        s.sweep_cursor += 1;
        if (s.sweep_cursor >= s.home_degree) s.sweep_done = true;
    }

    void resident_process(AgentState& s, const AgentView& view, StepResult& out) const {
        int winner = kNoAgent;
        bool winner_known = false;
        for (const AgentState* ap : *view.colocated) {
            const AgentState& a = *ap;
            if (!a.away || a.req_kind == ReqKind::None) continue;
            switch (a.req_kind) {
                case ReqKind::Parity: {
                    if (!tags_match(a, s)) break;
                    if (a.pending_ack) s.acks_rcvd += 1;
                    if (a.pending_notify) s.pending_notify = true;
                    if (a.pending_resolution) s.pending_resolution = true;
                    if (a.pending_report && a.seq == s.seq) {
                        s.reports_rcvd += 1;
                        if (a.min_local_set) fold_key(s.acc_min, s.acc_min_set, a.min_local);
                    }
                    if (a.pending_agg && a.agg_tag == s.agg_tag) {
                        s.acc_cnt += a.acc_cnt;
                        s.acc_deg += a.acc_deg;
                        s.acc_max = std::max(s.acc_max, a.acc_max);
                        s.agg_rcvd += 1;
                    }
                    break;
                }
                case ReqKind::BfsLevel:
                    bfs_accept_delivery(s, a, view.round);
                    break;
                case ReqKind::Combine: {
                    Outcome o = decide_combine(a, s);
                    if (o != Outcome::Absorb && o != Outcome::Merge) break;
                    if (!winner_known) {
                        winner = winning_mutator(s, *view.colocated, nullptr);
                        winner_known = true;
                    }
                    if (a.id != winner) break;
                    if (o == Outcome::Absorb) {
                        absorb_resident_side(s, a);
                        out.events.push_back(
                            {TraceEvent::absorb, "child=" + std::to_string(a.id)});
                    } else {
                        out.events.push_back(
                            {TraceEvent::merge, "with=" + std::to_string(a.id) + " level=" +
                                                    std::to_string(s.treelevel + 1)});
                        merge_sides(s, a, a.last_entry_port, a.task_port,
                                    /*i_win=*/s.treelabel < a.treelabel);
                    }
                    break;
                }
                case ReqKind::WaveReverse: {
                    if (tags_match(a, s)) break;
                    if (!winner_known) {
                        winner = winning_mutator(s, *view.colocated, nullptr);
                        winner_known = true;
                    }
                    if (a.id == winner) wave_reverse_resident(s, a);
                    break;
                }
                case ReqKind::WaveRelabel: {
                    if (tags_match(a, s) || a.last_entry_port != s.parent_port) break;
                    if (!winner_known) {
                        winner = winning_mutator(s, *view.colocated, nullptr);
                        winner_known = true;
                    }
                    if (a.id == winner) wave_relabel_resident(s, a);
                    break;
                }
                default:
                    break;
            }
        }
    }

    // ---- BFS segment ---------------------------------------------------------

    // In the leveled-sweep variant any delivery may improve a level; in the
    // level-synchronous variant only unleveled agents listen.
    static bool bfs_accept_any(const AgentState& s, std::int64_t round) {
        if (s.bfs_mode == BfsMode::MLogN) return true;
        if (s.bfs_mode != BfsMode::Improved) return false;
        return round - s.bfs_start >= 8LL * s.params_m * s.L();  // fallback sub-segment
    }

    void bfs_accept_delivery(AgentState& s, const AgentState& a, std::int64_t round) const {
        if (s.bfs_start < 0 || round < s.bfs_start || s.bfs_frozen) return;
        bool accept = bfs_accept_any(s, round) || s.level < 0;
        if (!accept) return;
        int lv = a.level, id = a.id;
        Port p = a.last_entry_port;
        bool better = s.bfs_cand_level < 0 || lv < s.bfs_cand_level ||
                      (lv == s.bfs_cand_level &&
                       (id < s.bfs_cand_id ||
                        (id == s.bfs_cand_id && p < s.bfs_cand_port)));
        if (better) {
            s.bfs_cand_level = lv;
            s.bfs_cand_id = id;
            s.bfs_cand_port = p;
        }
    }

    void bfs_step(AgentState& s, const AgentView& view, StepResult& out) const {
        const int L = s.L();
        const std::int64_t r = view.round;
        std::int64_t rel = r - s.bfs_start;

        BfsMode mode = s.bfs_mode;
        const std::int64_t budget = 8LL * s.params_m * L;
        if (mode == BfsMode::Improved) {
            if (rel < budget) {
                mode = BfsMode::DDelta;
            } else {
                if (rel == budget) bfs_reset_for_fallback(s);
                mode = BfsMode::MLogN;
                rel -= budget;
            }
        }
        if (rel == 0) bfs_segment_init(s);

        if (mode == BfsMode::MLogN)
            bfs_mlogn_step(s, view, out, rel);
        else
            bfs_ddelta_step(s, view, out, rel);
    }

    static void bfs_segment_init(AgentState& s) {
        if (s.bfs_root && s.level < 0) s.level = 0;
        s.bfs_cursor = 0;
        s.bfs_cand_level = -1;
        s.bfs_cand_id = kNoAgent;
        s.bfs_cand_port = kNoPort;
        s.task = TaskKind::None;
        s.task_done = false;
    }

    static void bfs_reset_for_fallback(AgentState& s) {
        s.level = s.bfs_root ? 0 : -1;
        s.bfs_parent_port = kNoPort;
        s.bfs_frozen = false;
        bfs_segment_init(s);
    }

    void bfs_mlogn_step(AgentState& s, const AgentView& view, StepResult& out,
                        std::int64_t rel) const {
        const int L = s.L();
        const int W = 4 * L;
        const std::int64_t w = rel / W;
        const int wr = static_cast<int>(rel % W);
        const std::int64_t total_windows = 2LL * s.params_m;

        if (w >= total_windows) {
            if (!s.bfs_frozen) {
                s.bfs_frozen = true;
                out.events.push_back({TraceEvent::state_change, "frozen"});
            }
            if (s.away) {  // boundary straggler: go home
                out.move = true;
                out.port = s.last_entry_port;
                s.away = false;
                s.req_kind = ReqKind::None;
            }
            return;
        }

        if (s.away) {
            visitor_interact(s, view, out);
            out.move = true;
            out.port = s.last_entry_port;
            s.away = false;
            s.req_kind = ReqKind::None;
            if (wr == W - 1) bfs_mlogn_window_end(s, out);
            return;
        }

        resident_process(s, view, out);

        if (wr == 0) {
            s.task = TaskKind::None;
            s.task_done = false;
            if (s.level >= 0 && s.bfs_cursor < view.degree) {
                s.task = TaskKind::BfsDeliver;
                s.task_port = s.bfs_cursor;
            }
        }
        if (wr % 2 == 0 && s.task == TaskKind::BfsDeliver && !s.task_done) {
            MeetingSchedule sched = compute_new_id(s.id, s.lambda);
            if (sched.bit(wr / 2)) {
                s.req_kind = ReqKind::BfsLevel;
                s.away = true;
                out.move = true;
                out.port = s.task_port;
                return;
            }
        }
        if (wr == W - 1) bfs_mlogn_window_end(s, out);
    }

    void bfs_mlogn_window_end(AgentState& s, StepResult& out) const {
        if (s.bfs_cand_level >= 0 && (s.level < 0 || s.bfs_cand_level + 1 < s.level)) {
            s.level = s.bfs_cand_level + 1;
            s.bfs_parent_port = s.bfs_cand_port;
            s.bfs_cursor = 0;
            out.events.push_back({TraceEvent::state_change, "level=" + std::to_string(s.level)});
        } else if (s.task == TaskKind::BfsDeliver && s.task_done) {
            s.bfs_cursor += 1;
        }
        s.bfs_cand_level = -1;
        s.bfs_cand_id = kNoAgent;
        s.bfs_cand_port = kNoPort;
    }

    void bfs_ddelta_step(AgentState& s, const AgentView& view, StepResult& out,
                         std::int64_t rel) const {
        const int L = s.L();
        const int W = 4 * L;
        const int SP = W + 2;
        const int delta = std::max(1, s.params_delta);
        const std::int64_t sp = rel / SP;
        const int wr = static_cast<int>(rel % SP);
        const std::int64_t period = sp;
        const std::int64_t phase_t = sp / delta;
        const int slot_port = static_cast<int>(sp % delta);
        const bool phase_last_round = (sp % delta == delta - 1) && wr == SP - 1;

        if (s.away) {
            visitor_interact(s, view, out);
            out.move = true;
            out.port = s.last_entry_port;
            s.away = false;
            s.req_kind = ReqKind::None;
            if (phase_last_round) bfs_ddelta_phase_end(s, phase_t, out);
            return;
        }

        resident_process(s, view, out);
        agg_ready_check(s);
        bfs_poll_progress(s);

        if (wr == 0) {
            s.task = TaskKind::None;
            s.task_done = false;
            if (!s.bfs_frozen && s.level == phase_t && slot_port < view.degree) {
                s.task = TaskKind::BfsDeliver;
                s.task_port = slot_port;
            }
        }
        if (wr < W && wr % 2 == 0 && s.task == TaskKind::BfsDeliver && !s.task_done) {
            MeetingSchedule sched = compute_new_id(s.id, s.lambda);
            if (sched.bit(wr / 2)) {
                s.req_kind = ReqKind::BfsLevel;
                s.away = true;
                out.move = true;
                out.port = s.task_port;
                return;
            }
        } else if (wr == W) {
            bool oscillate = !s.is_leader && s.parent_port != kNoPort &&
                             ((s.depth + period) % 2 == 1);
            if (oscillate) {
                s.req_kind = ReqKind::Parity;
                s.away = true;
                out.move = true;
                out.port = s.parent_port;
                return;
            }
        }
        if (phase_last_round) bfs_ddelta_phase_end(s, phase_t, out);
    }

    void bfs_ddelta_phase_end(AgentState& s, std::int64_t phase_t, StepResult& out) const {
        if (s.level < 0 && s.bfs_cand_level >= 0) {
            s.level = static_cast<int>(phase_t) + 1;
            s.bfs_parent_port = s.bfs_cand_port;
            out.events.push_back({TraceEvent::state_change, "level=" + std::to_string(s.level)});
        }
        s.bfs_cand_level = -1;
        s.bfs_cand_id = kNoAgent;
        s.bfs_cand_port = kNoPort;
    }

    // Root-side completion detection over the fragment tree: repeated count
    // polls; when the leveled-agent count reaches n, announce completion.
    void bfs_poll_progress(AgentState& s) const {
        if (!s.is_leader || s.bfs_root_done) return;
        if (s.parent_port != kNoPort) return;
        if (s.dir_kind == DirKind::Bfs) {
            // First poll of the segment.
            issue(s, DirKind::Poll);
            s.agg_tag = s.dir_stamp;
            s.acc_cnt = (s.level >= 0) ? 1 : 0;
            s.acc_deg = s.acc_max = 0;
            s.agg_rcvd = 0;
        } else if (s.dir_kind == DirKind::Poll && s.agg_rcvd >= s.child_count) {
            if (s.acc_cnt >= s.params_n) {
                s.bfs_root_done = true;
                s.bfs_frozen = true;
                issue(s, DirKind::BfsDone);
            } else {
                issue(s, DirKind::Poll);
                s.agg_tag = s.dir_stamp;
                s.acc_cnt = (s.level >= 0) ? 1 : 0;
                s.acc_deg = s.acc_max = 0;
                s.agg_rcvd = 0;
            }
        }
    }
};

}  // namespace agentnet

#endif
