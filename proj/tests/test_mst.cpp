#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <vector>

#include "agentnet/graph.hpp"
#include "agentnet/mst.hpp"
#include "agentnet/oracle.hpp"
#include "agentnet/runner.hpp"

using namespace agentnet;

namespace {

// Generous ceiling for small instances; termination well below it is part of
// what the round-count tests check.
constexpr std::int64_t kMax = 2'000'000;

RunOutcome run_mst(Configuration& c, Algorithm algo = Algorithm::mst, bool trace = false) {
    RunOutcome out = run_algorithm(c, algo, kMax, trace);
    REQUIRE(!out.timed_out);
    return out;
}

}  // namespace

TEST_CASE("two nodes merge into one fragment with the smaller ID leading") {
    PortLabeledGraph g = generate(Family::path, 2);
    Configuration c = init_dispersed(g);
    run_mst(c);
    auto r = verify_mst(c);
    std::string why = r.problems.empty() ? "" : r.problems.front();
    INFO(why);
    CHECK(r.ok);
    CHECK(c.states[0].is_leader);
    CHECK_FALSE(c.states[1].is_leader);
    CHECK(c.states[1].parent_port == 0);
    CHECK(c.states[0].treelabel == 0);
    CHECK(c.states[1].treelabel == 0);
}

TEST_CASE("every connected graph up to five nodes yields the minimum spanning tree") {
    for (const auto& g : oracle::enumerate_small(5)) {
        Configuration c = init_dispersed(g);
        run_mst(c);
        auto r = verify_mst(c);
        INFO("n=" << g.node_count << " first problem: "
                  << (r.problems.empty() ? "-" : r.problems.front()));
        REQUIRE(r.ok);
    }
}

TEST_CASE("standard families") {
    std::vector<PortLabeledGraph> gs;
    gs.push_back(generate(Family::path, 9));
    gs.push_back(generate(Family::cycle, 8));
    gs.push_back(generate(Family::star, 9));
    gs.push_back(generate(Family::complete, 7));
    gs.push_back(generate(Family::random_connected_gnp, 12, 0.45, 7));
    for (const auto& g : gs) {
        Configuration c = init_dispersed(g);
        run_mst(c);
        auto r = verify_mst(c);
        INFO("n=" << g.node_count << " first problem: "
                  << (r.problems.empty() ? "-" : r.problems.front()));
        REQUIRE(r.ok);
    }
}

TEST_CASE("result is correct for any placement of IDs on nodes") {
    PortLabeledGraph g = generate(Family::random_connected_gnp, 10, 0.5, 3);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
        Configuration c = init_dispersed(g, IdAssignment::seeded_permutation, seed);
        run_mst(c);
        auto r = verify_mst(c);
        INFO("seed=" << seed << " first problem: "
                     << (r.problems.empty() ? "-" : r.problems.front()));
        REQUIRE(r.ok);
    }
}

TEST_CASE("external integer weights override the virtual order") {
    // Cycle 0-1-2-3-0 where the virtually-cheapest edges are made expensive.
    PortLabeledGraph g = parse_graph_text(
        "4 4\n"
        "0 1 0 0 90\n"
        "1 2 1 0 10\n"
        "2 3 1 0 20\n"
        "3 0 1 1 30\n");
    Configuration c = init_dispersed(g);
    run_mst(c);
    auto r = verify_mst(c);
    std::string why = r.problems.empty() ? "" : r.problems.front();
    INFO(why);
    REQUIRE(r.ok);
    std::set<std::pair<NodeId, NodeId>> tree;
    for (int i = 0; i < c.n_agents(); ++i) {
        const AgentState& s = c.states[i];
        if (s.parent_port == kNoPort) continue;
        NodeId v = c.placement[i];
        NodeId u = g.adjacency[v][s.parent_port].neighbor;
        tree.insert({std::min(u, v), std::max(u, v)});
    }
    std::set<std::pair<NodeId, NodeId>> want{{1, 2}, {2, 3}, {0, 3}};
    CHECK(tree == want);
}

TEST_CASE("single node terminates as its own leader") {
    PortLabeledGraph g = generate(Family::path, 1);
    Configuration c = init_dispersed(g);
    auto out = run_mst(c, Algorithm::leader);
    CHECK(c.states[0].is_leader);
    CHECK(c.states[0].phase == MstPhase::Done);
    CHECK(out.metrics.total_moves == 0);
}

TEST_CASE("leader election picks exactly one leader") {
    for (const auto& g : {generate(Family::cycle, 6), generate(Family::complete, 5), generate(Family::random_connected_gnp, 9, 0.5, 11)}) {
        Configuration c = init_dispersed(g, IdAssignment::seeded_permutation, 5);
        run_mst(c, Algorithm::leader);
        auto r = verify_leader(c);
        std::string why = r.problems.empty() ? "" : r.problems.front();
    INFO(why);
        REQUIRE(r.ok);
    }
}

TEST_CASE("agents learn the graph parameters before terminating") {
    PortLabeledGraph g = generate(Family::random_connected_gnp, 8, 0.6, 2);
    std::int64_t m = 0;
    int dmax = 0;
    for (NodeId v = 0; v < g.node_count; ++v) {
        m += g.degree(v);
        dmax = std::max(dmax, g.degree(v));
    }
    m /= 2;
    Configuration c = init_dispersed(g);
    run_mst(c);
    for (const auto& s : c.states) {
        REQUIRE(s.params_set);
        CHECK(s.params_n == g.node_count);
        CHECK(s.params_m == m);
        CHECK(s.params_delta == dmax);
    }
}

TEST_CASE("runs are deterministic") {
    PortLabeledGraph g = generate(Family::random_connected_gnp, 9, 0.5, 4);
    Configuration c1 = init_dispersed(g);
    Configuration c2 = init_dispersed(g);
    auto o1 = run_mst(c1, Algorithm::mst, true);
    auto o2 = run_mst(c2, Algorithm::mst, true);
    CHECK(o1.trace.hash() == o2.trace.hash());
    CHECK(o1.metrics.total_rounds == o2.metrics.total_rounds);
    CHECK(o1.metrics.total_moves == o2.metrics.total_moves);
}

TEST_CASE("fragment count at least halves across merge generations") {
    // Sample the number of distinct fragment tags at each super-period
    // boundary; the sequence must be non-increasing and reach 1.
    PortLabeledGraph g = generate(Family::path, 8);
    Configuration c = init_dispersed(g);
    TreeProtocol protocol(Algorithm::mst);
    const int L = static_cast<int>(c.states[0].L());
    const int SP = 4 * L + 2;
    std::vector<int> fragment_counts;
    auto stop = [&](const Configuration& cc) {
        if (cc.round % SP == 0) {
            std::set<std::pair<std::int64_t, std::int64_t>> tags;
            for (const auto& s : cc.states) tags.insert({s.treelabel, s.treelevel});
            if (fragment_counts.empty() || fragment_counts.back() != (int)tags.size())
                fragment_counts.push_back(static_cast<int>(tags.size()));
        }
        return all_done(cc);
    };
    run_until(c, protocol, stop, kMax, false);
    REQUIRE(!fragment_counts.empty());
    CHECK(fragment_counts.front() == 8);
    CHECK(fragment_counts.back() == 1);
    for (std::size_t i = 1; i < fragment_counts.size(); ++i)
        CHECK(fragment_counts[i] < fragment_counts[i - 1]);
}

TEST_CASE("round count stays within the budget used by the round-complexity bound") {
    // For n agents with lambda = n-1 the window length is Theta(log n); the
    // whole construction must finish in O(m * L * log n) rounds. Check a
    // concrete multiple on a midsize instance.
    PortLabeledGraph g = generate(Family::random_connected_gnp, 16, 0.4, 9);
    std::int64_t m = 0;
    for (NodeId v = 0; v < g.node_count; ++v) m += g.degree(v);
    m /= 2;
    Configuration c = init_dispersed(g);
    const std::int64_t L = c.states[0].L();
    auto out = run_mst(c);
    auto r = verify_mst(c);
    REQUIRE(r.ok);
    CHECK(out.metrics.total_rounds <= 64 * m * L * L);
}
