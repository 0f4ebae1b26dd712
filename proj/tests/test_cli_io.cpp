#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "agentnet/graph.hpp"

using namespace agentnet;

namespace {

// The CLI binary sits next to the test binaries; tests run from the build dir.
const char* kBin = "./agentnet";

int run_cmd(const std::string& args, std::string* out = nullptr) {
    std::string tmp = "cli_test_stdout.txt";
    int rc = std::system((std::string(kBin) + " " + args + " > " + tmp + " 2>&1").c_str());
    if (out) {
        std::ifstream in(tmp);
        std::stringstream ss;
        ss << in.rdbuf();
        *out = ss.str();
    }
    std::remove(tmp.c_str());
#ifdef WEXITSTATUS
    if (rc != -1) rc = WEXITSTATUS(rc);
#endif
    return rc;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("generate writes the canonical format") {
    std::string out;
    CHECK(run_cmd("generate path 5", &out) == 0);
    CHECK(out.substr(0, 3) == "5 4");
    PortLabeledGraph g = parse_graph_text(out);
    CHECK(g.node_count == 5);
}

TEST_CASE("generate is reproducible per seed") {
    CHECK(run_cmd("generate gnp 16 0.3 --seed 42 --out cli_g1.txt") == 0);
    CHECK(run_cmd("generate gnp 16 0.3 --seed 42 --out cli_g2.txt") == 0);
    CHECK(slurp("cli_g1.txt") == slurp("cli_g2.txt"));
    CHECK(!slurp("cli_g1.txt").empty());
    std::remove("cli_g1.txt");
    std::remove("cli_g2.txt");
}

TEST_CASE("generate rejects an empty graph with a usage exit code") {
    std::string out;
    CHECK(run_cmd("generate gnp 0 0.3", &out) == 64);
    CHECK(out.find("error") != std::string::npos);
}

TEST_CASE("run emits a metrics row and a tree file") {
    CHECK(run_cmd("generate path 3 --out cli_p3.txt") == 0);
    std::string out;
    CHECK(run_cmd("run --algorithm mst --graph cli_p3.txt --tree-out cli_tree.txt "
                  "--metrics-out cli_metrics.csv",
                  &out) == 0);
    CHECK(out.find("graph,n,m,delta,diameter,algorithm,rounds,moves,peak_bits") !=
          std::string::npos);
    CHECK(out.find("cli_p3.txt,3,2,") != std::string::npos);
    std::string tree = slurp("cli_tree.txt");
    CHECK(tree == "0 1\n1 2\n");
    std::string metrics = slurp("cli_metrics.csv");
    CHECK(metrics.find(",mst,") != std::string::npos);
    std::remove("cli_p3.txt");
    std::remove("cli_tree.txt");
    std::remove("cli_metrics.csv");
}

TEST_CASE("same config twice gives identical trace artifacts") {
    std::ofstream("cli_cfg.json") << R"({"family":"gnp","n":8,"p":0.5,"seed":3,)"
                                  << R"("algorithm":"mst","trace_out":"cli_t1.jsonl"})";
    CHECK(run_cmd("run --config cli_cfg.json") == 0);
    CHECK(run_cmd("run --config cli_cfg.json --trace-out cli_t2.jsonl") == 0);
    std::string t1 = slurp("cli_t1.jsonl"), t2 = slurp("cli_t2.jsonl");
    CHECK(!t1.empty());
    CHECK(t1 == t2);
    std::remove("cli_cfg.json");
    std::remove("cli_t1.jsonl");
    std::remove("cli_t2.jsonl");
}

TEST_CASE("verify reports PASS lines and exit 0 on a correct run") {
    std::string out;
    CHECK(run_cmd("verify --family path --n 2 --algorithm mst", &out) == 0);
    CHECK(out.find("PASS leader-unique") != std::string::npos);
    CHECK(out.find("PASS mst-equality") != std::string::npos);
    CHECK(out.find("FAIL") == std::string::npos);
}

TEST_CASE("verify sweeps pass on random graphs") {
    for (int n : {8, 16}) {
        std::string out;
        std::string cmd = "verify --family gnp --n " + std::to_string(n) +
                          " --p 0.4 --seed 1 --algorithm bfs";
        CHECK(run_cmd(cmd, &out) == 0);
        CHECK(out.find("PASS bfs-levels") != std::string::npos);
    }
}

TEST_CASE("known-root mode runs the level construction alone") {
    std::string out;
    CHECK(run_cmd("run --family star --n 7 --algorithm bfs-mlogn --root 2 "
                  "--tree-out cli_lv.txt",
                  &out) == 0);
    std::string lv = slurp("cli_lv.txt");
    CHECK(lv.find("2 level 0") != std::string::npos);
    CHECK(lv.find("0 level 1") != std::string::npos);
    std::remove("cli_lv.txt");
}

TEST_CASE("timeout returns its own exit code") {
    std::string out;
    CHECK(run_cmd("run --family cycle --n 8 --algorithm mst --max-rounds 5", &out) == 3);
    CHECK(out.find("timeout") != std::string::npos);
}

TEST_CASE("bench emits one CSV row per configuration") {
    std::string out;
    CHECK(run_cmd("bench --family path --sizes 4,6 --seeds 0 --algorithms mst,leader", &out) ==
          0);
    std::istringstream ss(out);
    std::string line;
    int rows = 0;
    REQUIRE(std::getline(ss, line));
    CHECK(line == "graph,n,m,delta,diameter,algorithm,rounds,moves,peak_bits");
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
}
