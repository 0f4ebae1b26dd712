#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "agentnet/meeting.hpp"

using namespace agentnet;

TEST_CASE("new_id construction: complement || padded") {
    // L = 4 for lambda = 12 (IDs fit in 4 bits).
    CHECK(bit_length_for_lambda(12) == 4);
    CHECK(new_id_string(4, 12) == "10110100");
    CHECK(new_id_string(6, 12) == "10010110");
    CHECK(bit_length_for_lambda(15) == 4);
    CHECK(new_id_string(2, 15) == "11010010");
    CHECK(new_id_string(0, 1) == "10");
    CHECK(new_id_string(1, 1) == "01");
    CHECK_THROWS_AS((void)compute_new_id(13, 12), SimError);
    CHECK_THROWS_AS((void)compute_new_id(-1, 12), SimError);
}

TEST_CASE("every new_id has exactly L ones (half the slots are active)") {
    for (std::int64_t lam : {1, 2, 7, 12, 63, 100}) {
        int L = bit_length_for_lambda(lam);
        for (std::int64_t id = 0; id <= lam; ++id) {
            MeetingSchedule s = compute_new_id(id, lam);
            CHECK(s.length == 2 * L);
            CHECK(s.window_length == 4 * L);
            int ones = 0;
            for (int b = 0; b < s.length; ++b) ones += s.bit(b);
            CHECK(ones == L);
        }
    }
}

TEST_CASE("round actions follow the slot bits, LSB first") {
    MeetingSchedule s = compute_new_id(4, 12);  // slots LSB->MSB: 0,0,1,0,1,1,0,1
    CHECK(action_for_round(s, 0) == MeetAction::stay);   // slot 0 = 0
    CHECK(action_for_round(s, 4) == MeetAction::move_out);  // slot 2 = 1
    CHECK(action_for_round(s, 5) == MeetAction::return_home);
    CHECK(action_for_round(s, 6) == MeetAction::stay);   // slot 3 = 0
    CHECK(action_for_round(s, 15) == MeetAction::return_home);  // slot 7 = 1
    CHECK_THROWS_AS((void)action_for_round(s, 16), SimError);
    CHECK_THROWS_AS((void)action_for_round(s, -1), SimError);
}

TEST_CASE("guaranteed meeting slot, pinned examples") {
    CHECK(guaranteed_meeting_slot(4, 6, 12) == 5);
    CHECK(guaranteed_meeting_slot(2, 6, 15) == 6);
    CHECK_THROWS_AS((void)guaranteed_meeting_slot(3, 3, 12), SimError);
}

TEST_CASE("meeting slot exists for every distinct pair (exhaustive, lambda = 63)") {
    const std::int64_t lam = 63;
    MeetingSchedule s[64];
    for (int id = 0; id <= lam; ++id) s[id] = compute_new_id(id, lam);
    for (int u = 0; u <= lam; ++u)
        for (int v = 0; v <= lam; ++v) {
            if (u == v) continue;
            int slot = guaranteed_meeting_slot(u, v, lam);
            CHECK(slot >= 0);
            CHECK(slot < 2 * 6);
            CHECK(s[u].bit(slot));
            CHECK_FALSE(s[v].bit(slot));
            // In that slot u moves out while v stays home: co-location.
            CHECK(action_for_round(s[u], 2 * slot) == MeetAction::move_out);
            CHECK(action_for_round(s[v], 2 * slot) == MeetAction::stay);
            CHECK(action_for_round(s[v], 2 * slot + 1) == MeetAction::stay);
        }
}
