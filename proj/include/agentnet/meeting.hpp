#ifndef AGENTNET_MEETING_HPP
#define AGENTNET_MEETING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "agentnet/common.hpp"
#include "agentnet/graph.hpp"

namespace agentnet {

// "Meeting with Neighbor": a 4L-round windowed schedule guaranteeing that two
// adjacent agents with distinct IDs are co-located in some round of an aligned
// window. The agent's ID (padded to L bits) is extended to the 2L-bit
// new_id = complement(padded) || padded; the window is scanned in 2-round
// slots, one per bit, LSB to MSB: bit 1 -> go out and come back, bit 0 -> stay.

enum class MeetAction { move_out, return_home, stay };

struct MeetingSchedule {
    std::uint64_t new_id_bits = 0;  // bit s = slot-s behavior (LSB = slot 0)
    int length = 0;                 // 2L
    int window_length = 0;          // 4L
    Port target_port = 0;

    bool bit(int slot) const { return (new_id_bits >> slot) & 1u; }

    // MSB-first rendering, matching the written form of the bit string.
    std::string to_string() const {
        std::string s;
        for (int i = length - 1; i >= 0; --i) s += bit(i) ? '1' : '0';
        return s;
    }
};

// new_id as a bit string of length 2L: right half the padded ID, left half its
// complement. Returned MSB-first to match the written form.
inline MeetingSchedule compute_new_id(std::int64_t id, std::int64_t lambda, Port target_port = 0) {
    if (id < 0 || id > lambda) fail(Errc::invalid_id, "id must lie in [0, lambda]");
    int L = bit_length_for_lambda(lambda);
    MeetingSchedule s;
    s.length = 2 * L;
    s.window_length = 4 * L;
    s.target_port = target_port;
    std::uint64_t padded = static_cast<std::uint64_t>(id);
    std::uint64_t mask = (L >= 64) ? ~0ULL : ((1ULL << L) - 1);
    std::uint64_t complement = (~padded) & mask;
    s.new_id_bits = padded | (complement << L);
    return s;
}

inline std::string new_id_string(std::int64_t id, std::int64_t lambda) {
    return compute_new_id(id, lambda).to_string();
}

// Behavior in round round_in_window of an aligned window. Slot s covers rounds
// 2s and 2s+1; bit 1 means out on the first round and home on the second.
inline MeetAction action_for_round(const MeetingSchedule& sched, int round_in_window) {
    if (round_in_window < 0 || round_in_window >= sched.window_length)
        fail(Errc::out_of_window, "round " + std::to_string(round_in_window) + " outside window");
    int slot = round_in_window / 2;
    if (!sched.bit(slot)) return MeetAction::stay;
    return (round_in_window % 2 == 0) ? MeetAction::move_out : MeetAction::return_home;
}

// Smallest slot where u's bit is 1 and v's bit is 0, so u arrives while v is
// home. Exists for any distinct pair: the padded IDs differ in some bit, and
// either the padded half or the complemented half provides (1, 0).
inline int guaranteed_meeting_slot(std::int64_t id_u, std::int64_t id_v, std::int64_t lambda) {
    if (id_u == id_v) fail(Errc::not_distinct, "ids must be distinct");
    MeetingSchedule u = compute_new_id(id_u, lambda);
    MeetingSchedule v = compute_new_id(id_v, lambda);
    for (int s = 0; s < u.length; ++s)
        if (u.bit(s) && !v.bit(s)) return s;
    fail(Errc::internal_inconsistency, "no differing slot for distinct ids");
}

}  // namespace agentnet

#endif
