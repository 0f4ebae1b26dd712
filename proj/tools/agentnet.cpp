// Command-line front end: generate graphs, run the protocols, verify results
// against single-machine reference algorithms, and sweep benchmarks.
//
// Exit codes: 0 success, 2 verification failure, 3 round-limit timeout,
// 64 usage or input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "agentnet/graph.hpp"
#include "agentnet/mst.hpp"
#include "agentnet/oracle.hpp"
#include "agentnet/runner.hpp"

using namespace agentnet;
using nlohmann::json;

namespace {

int log_level() {
    const char* v = std::getenv("AGENTNET_LOG");
    return v ? std::atoi(v) : 0;
}

void logv(const std::string& msg) {
    if (log_level() > 0) std::cerr << "[agentnet] " << msg << "\n";
}

struct RunConfig {
    std::string graph_file;
    std::string family;
    int n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::string assignment = "identity";  // or "permutation"
    std::uint64_t id_seed = 0;
    std::string algorithm = "mst";
    std::int64_t max_rounds = 50'000'000;
    int root = -1;  // agent ID; >=0 switches bfs-mlogn/bfs-ddelta to known-root mode
    std::int64_t m = -1;
    std::string trace_out, metrics_out, tree_out;
};

void config_from_json(const json& j, RunConfig& rc) {
    if (j.contains("graph")) rc.graph_file = j["graph"];
    if (j.contains("family")) rc.family = j["family"];
    if (j.contains("n")) rc.n = j["n"];
    if (j.contains("p")) rc.p = j["p"];
    if (j.contains("seed")) rc.seed = j["seed"];
    if (j.contains("assignment")) rc.assignment = j["assignment"];
    if (j.contains("id_seed")) rc.id_seed = j["id_seed"];
    if (j.contains("algorithm")) rc.algorithm = j["algorithm"];
    if (j.contains("max_rounds")) rc.max_rounds = j["max_rounds"];
    if (j.contains("root")) rc.root = j["root"];
    if (j.contains("m")) rc.m = j["m"];
    if (j.contains("trace_out")) rc.trace_out = j["trace_out"];
    if (j.contains("metrics_out")) rc.metrics_out = j["metrics_out"];
    if (j.contains("tree_out")) rc.tree_out = j["tree_out"];
}

Family parse_family(const std::string& f) {
    if (f == "path") return Family::path;
    if (f == "cycle") return Family::cycle;
    if (f == "star") return Family::star;
    if (f == "complete") return Family::complete;
    if (f == "gnp") return Family::random_connected_gnp;
    fail(Errc::bad_config, "unknown family: " + f);
}

Algorithm parse_algorithm(const std::string& a) {
    if (a == "mst") return Algorithm::mst;
    if (a == "leader") return Algorithm::leader;
    if (a == "bfs") return Algorithm::bfs;
    if (a == "bfs-mlogn") return Algorithm::bfs_mlogn;
    if (a == "bfs-ddelta") return Algorithm::bfs_ddelta;
    fail(Errc::bad_config, "unknown algorithm: " + a);
}

PortLabeledGraph load_graph(const RunConfig& rc, std::string& name) {
    if (!rc.graph_file.empty()) {
        std::ifstream in(rc.graph_file);
        if (!in) fail(Errc::bad_config, "cannot open " + rc.graph_file);
        std::stringstream ss;
        ss << in.rdbuf();
        name = rc.graph_file;
        return parse_graph_text(ss.str());
    }
    if (rc.family.empty()) fail(Errc::bad_config, "need --graph or --family");
    name = rc.family + "-" + std::to_string(rc.n);
    return generate(parse_family(rc.family), rc.n, rc.p, rc.seed);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) fail(Errc::bad_config, "cannot write " + path);
    out << content;
}

struct RunArtifacts {
    Configuration config;
    RunOutcome outcome;
    Algorithm algo = Algorithm::mst;
    bool standalone = false;
    std::string graph_name;
};

// Executes a configured run; the graph must outlive the returned Configuration.
RunArtifacts execute(const RunConfig& rc, const PortLabeledGraph& g,
                     const std::string& graph_name, bool store_trace) {
    RunArtifacts art;
    art.algo = parse_algorithm(rc.algorithm);
    art.graph_name = graph_name;
    IdAssignment ia = rc.assignment == "permutation" ? IdAssignment::seeded_permutation
                                                     : IdAssignment::identity;
    art.config = init_dispersed(g, ia, rc.id_seed);

    art.standalone = rc.root >= 0 && (art.algo == Algorithm::bfs_mlogn ||
                                      art.algo == Algorithm::bfs_ddelta);
    if (art.standalone) {
        NodeId root_node = -1;
        for (int i = 0; i < art.config.n_agents(); ++i)
            if (art.config.states[i].id == rc.root) root_node = art.config.placement[i];
        if (root_node < 0) fail(Errc::bad_config, "no agent with ID " + std::to_string(rc.root));
        BfsMode mode = art.algo == Algorithm::bfs_mlogn ? BfsMode::MLogN : BfsMode::DDelta;
        setup_standalone_bfs(art.config, root_node, mode, rc.m);
        TreeProtocol protocol(art.algo);
        std::function<bool(const Configuration&)> stop;
        if (mode == BfsMode::MLogN) {
            stop = all_frozen;
        } else {
            const AgentState& s0 = art.config.states[0];
            std::int64_t horizon = (4 * s0.L() + 2) * s0.params_delta * (g.node_count + 1);
            stop = [horizon](const Configuration& c) { return c.round >= horizon; };
        }
        try {
            auto [metrics, trace] =
                run_until(art.config, protocol, stop, rc.max_rounds, store_trace);
            art.outcome.metrics = std::move(metrics);
            art.outcome.trace = std::move(trace);
        } catch (const TimeoutError& e) {
            art.outcome.metrics = e.metrics;
            art.outcome.timed_out = true;
        }
    } else {
        art.outcome = run_algorithm(art.config, art.algo, rc.max_rounds, store_trace);
    }
    logv("run finished: rounds=" + std::to_string(art.outcome.metrics.total_rounds) +
         (art.outcome.timed_out ? " (timeout)" : ""));
    return art;
}

void write_artifacts(const RunConfig& rc, const RunArtifacts& art, const PortLabeledGraph& g) {
    if (!rc.metrics_out.empty())
        write_file(rc.metrics_out, csv_header() + "\n" +
                                       csv_row(art.graph_name, g, art.algo, art.outcome.metrics) +
                                       "\n");
    if (!rc.trace_out.empty()) {
        std::ofstream out(rc.trace_out);
        if (!out) fail(Errc::bad_config, "cannot write " + rc.trace_out);
        write_trace_jsonl(out, art.outcome.trace);
    }
    if (!rc.tree_out.empty()) {
        std::string body;
        if (art.algo == Algorithm::bfs_mlogn || art.algo == Algorithm::bfs_ddelta ||
            art.algo == Algorithm::bfs) {
            // Per-agent level table followed by the spanning-tree edge list.
            for (int i = 0; i < art.config.n_agents(); ++i) {
                const AgentState& s = art.config.states[i];
                body += std::to_string(art.config.placement[i]) + " level " +
                        std::to_string(s.level) + " parent_port " +
                        std::to_string(s.bfs_parent_port) + "\n";
            }
        }
        body += tree_edge_list(art.config);
        write_file(rc.tree_out, body);
    }
}

int verify_and_report(const RunArtifacts& art) {
    struct Check {
        const char* name;
        VerifyResult result;
    };
    std::vector<Check> checks;
    bool bfs_like = art.algo == Algorithm::bfs || art.algo == Algorithm::bfs_mlogn ||
                    art.algo == Algorithm::bfs_ddelta;
    if (art.algo == Algorithm::mst || (bfs_like && !art.standalone)) {
        checks.push_back({"leader-unique", verify_leader(art.config)});
        checks.push_back({"mst-equality", verify_mst(art.config)});
    }
    if (art.algo == Algorithm::leader)
        checks.push_back({"leader-unique", verify_leader(art.config)});
    if (bfs_like) checks.push_back({"bfs-levels", verify_bfs(art.config)});

    int failures = 0;
    for (const auto& c : checks) {
        std::cout << (c.result.ok ? "PASS " : "FAIL ") << c.name << "\n";
        if (!c.result.ok) {
            ++failures;
            for (const auto& p : c.result.problems) std::cout << "     " << p << "\n";
        }
    }
    return failures;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mobile-agent tree algorithms on port-labeled graphs"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a graph file");
    std::string gen_family, gen_out;
    int gen_n = 0;
    double gen_p = 0.0;
    std::uint64_t gen_seed = 0;
    gen->add_option("family", gen_family)->required();
    gen->add_option("n", gen_n)->required();
    gen->add_option("p", gen_p);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out);

    // shared run/verify flags
    auto add_run_flags = [](CLI::App* cmd, RunConfig& rc, std::string& config_path) {
        cmd->add_option("--config", config_path, "JSON config file; flags override it");
        cmd->add_option("--graph", rc.graph_file);
        cmd->add_option("--family", rc.family);
        cmd->add_option("--n", rc.n);
        cmd->add_option("--p", rc.p);
        cmd->add_option("--seed", rc.seed);
        cmd->add_option("--assignment", rc.assignment);
        cmd->add_option("--id-seed", rc.id_seed);
        cmd->add_option("--algorithm", rc.algorithm);
        cmd->add_option("--max-rounds", rc.max_rounds);
        cmd->add_option("--root", rc.root);
        cmd->add_option("--m", rc.m);
        cmd->add_option("--trace-out", rc.trace_out);
        cmd->add_option("--metrics-out", rc.metrics_out);
        cmd->add_option("--tree-out", rc.tree_out);
    };

    RunConfig run_rc;
    std::string run_config_path;
    auto* run = app.add_subcommand("run", "run a protocol and write artifacts");
    add_run_flags(run, run_rc, run_config_path);

    RunConfig ver_rc;
    std::string ver_config_path;
    auto* ver = app.add_subcommand("verify", "run and check against reference algorithms");
    add_run_flags(ver, ver_rc, ver_config_path);

    // bench
    auto* bench = app.add_subcommand("bench", "sweep sizes/seeds, emit one CSV row per run");
    std::string bench_family = "path", bench_algos = "mst", bench_sizes = "8",
                bench_seeds = "0", bench_out;
    double bench_p = 0.4;
    std::int64_t bench_max_rounds = 50'000'000;
    bench->add_option("--family", bench_family);
    bench->add_option("--p", bench_p);
    bench->add_option("--sizes", bench_sizes, "comma-separated node counts");
    bench->add_option("--seeds", bench_seeds, "comma-separated generator seeds");
    bench->add_option("--algorithms", bench_algos, "comma-separated algorithm names");
    bench->add_option("--max-rounds", bench_max_rounds);
    bench->add_option("--metrics-out", bench_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 64;
    }

    try {
        if (gen->parsed()) {
            PortLabeledGraph g = generate(parse_family(gen_family), gen_n, gen_p, gen_seed);
            std::string text = write_graph_text(g);
            if (gen_out.empty())
                std::cout << text;
            else
                write_file(gen_out, text);
            return 0;
        }

        auto load_config = [](const std::string& path, RunConfig& rc) {
            if (path.empty()) return;
            std::ifstream in(path);
            if (!in) fail(Errc::bad_config, "cannot open " + path);
            json j = json::parse(in);
            config_from_json(j, rc);
        };

        if (run->parsed() || ver->parsed()) {
            RunConfig rc = run->parsed() ? run_rc : ver_rc;
            // Config file first, then re-apply explicit flags on top.
            RunConfig flags = rc;
            load_config(run->parsed() ? run_config_path : ver_config_path, rc);
            auto* cmd = run->parsed() ? run : ver;
            if (cmd->count("--graph")) rc.graph_file = flags.graph_file;
            if (cmd->count("--family")) rc.family = flags.family;
            if (cmd->count("--n")) rc.n = flags.n;
            if (cmd->count("--p")) rc.p = flags.p;
            if (cmd->count("--seed")) rc.seed = flags.seed;
            if (cmd->count("--assignment")) rc.assignment = flags.assignment;
            if (cmd->count("--id-seed")) rc.id_seed = flags.id_seed;
            if (cmd->count("--algorithm")) rc.algorithm = flags.algorithm;
            if (cmd->count("--max-rounds")) rc.max_rounds = flags.max_rounds;
            if (cmd->count("--root")) rc.root = flags.root;
            if (cmd->count("--m")) rc.m = flags.m;
            if (cmd->count("--trace-out")) rc.trace_out = flags.trace_out;
            if (cmd->count("--metrics-out")) rc.metrics_out = flags.metrics_out;
            if (cmd->count("--tree-out")) rc.tree_out = flags.tree_out;

            std::string name;
            PortLabeledGraph g = load_graph(rc, name);
            bool want_trace = !rc.trace_out.empty();
            RunArtifacts art = execute(rc, g, name, want_trace);
            write_artifacts(rc, art, g);
            std::cout << csv_header() << "\n"
                      << csv_row(name, g, art.algo, art.outcome.metrics) << "\n";
            if (art.outcome.timed_out) {
                std::cerr << "timeout: no termination within " << rc.max_rounds << " rounds\n";
                return 3;
            }
            if (ver->parsed() && verify_and_report(art) > 0) return 2;
            return 0;
        }

        if (bench->parsed()) {
            auto split = [](const std::string& s) {
                std::vector<std::string> parts;
                std::stringstream ss(s);
                std::string item;
                while (std::getline(ss, item, ',')) parts.push_back(item);
                return parts;
            };
            std::ostringstream csv;
            csv << csv_header() << "\n";
            for (const std::string& size : split(bench_sizes))
                for (const std::string& seed : split(bench_seeds))
                    for (const std::string& algo : split(bench_algos)) {
                        RunConfig rc;
                        rc.family = bench_family;
                        rc.n = std::stoi(size);
                        rc.p = bench_p;
                        rc.seed = std::stoull(seed);
                        rc.algorithm = algo;
                        rc.max_rounds = bench_max_rounds;
                        std::string name;
                        PortLabeledGraph g = load_graph(rc, name);
                        RunArtifacts art = execute(rc, g, name, false);
                        if (art.outcome.timed_out) {
                            std::cerr << "timeout on " << name << "\n";
                            return 3;
                        }
                        csv << csv_row(name, g, art.algo, art.outcome.metrics) << "\n";
                    }
            if (bench_out.empty())
                std::cout << csv.str();
            else
                write_file(bench_out, csv.str());
            return 0;
        }
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    }
    return 64;
}
