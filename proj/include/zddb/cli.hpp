#pragma once

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zddb/builder.hpp"
#include "zddb/combwm.hpp"
#include "zddb/experiment.hpp"
#include "zddb/family_oracle.hpp"
#include "zddb/graph.hpp"
#include "zddb/rng.hpp"
#include "zddb/weighted_dp.hpp"
#include "zddb/zdd.hpp"

namespace zddb {

namespace detail {

inline Zdd load_zdd_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open zdd file: " + path);
    return read_zdd(in);
}

inline Graph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    return read_graph(in);
}

inline Graph random_connected_graph(int n_nodes, int extra_edges, Rng& rng) {
    std::vector<std::pair<int, int>> pairs;
    std::set<std::pair<int, int>> used;
    for (int v = 1; v < n_nodes; ++v) {
        const int u = static_cast<int>(rng() % static_cast<std::uint64_t>(v));
        pairs.push_back(std::minmax(u, v));
        used.insert(pairs.back());
    }
    for (int k = 0; k < extra_edges; ++k) {
        const int u = static_cast<int>(rng() % static_cast<std::uint64_t>(n_nodes));
        const int v = static_cast<int>(rng() % static_cast<std::uint64_t>(n_nodes));
        if (u == v) continue;
        auto key = std::minmax(u, v);
        if (used.insert(key).second) pairs.push_back(key);
    }
    std::vector<GraphEdge> edges;
    for (std::size_t k = 0; k < pairs.size(); ++k)
        edges.push_back({static_cast<int>(k) + 1, pairs[k].first, pairs[k].second, 1.0});
    return Graph(n_nodes, std::move(edges));
}

// Brute-force-vs-DP equivalence suite on random instances; the diagnostic
// behind `oracle-check`.
inline int oracle_check(int size, std::uint64_t seed, std::ostream& os) {
    Rng rng(seed);
    int failures = 0;
    auto report = [&](const std::string& name, bool ok) {
        os << (ok ? "ok   " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    for (int g = 0; g < 10; ++g) {
        Graph graph = random_connected_graph(size, size / 2 + 2, rng);
        const int s = 0, t = size - 1;
        Family brute = brute_force_st_paths(graph, s, t);
        Zdd z = build_st_paths(graph, s, t);
        Family enumerated = enumerate_family(z);
        std::sort(enumerated.begin(), enumerated.end());
        bool eq = enumerated == brute;  // brute force comes out sorted
        bool valid = validate(z).ok();
        report("paths graph " + std::to_string(g) + ": frontier family matches brute force",
               eq);
        report("paths graph " + std::to_string(g) + ": diagram validates", valid);
        if (brute.empty()) continue;

        std::vector<double> log_w(graph.arm_count());
        for (double& x : log_w) x = 4.0 * uniform01(rng) - 2.0;
        WeightVector w{log_w};
        BackwardWeights b = backward_weights(z, w);
        ForwardWeights f = forward_weights(z, w);
        BwcTable c = bwc(z, w, b);
        CpmMatrix p = cpm(z, w, f, b, c);
        SymMatrix ref = family_cpm(brute, log_w, graph.arm_count());
        double worst = 0.0;
        for (int i = 0; i < p.dim(); ++i)
            for (int j = 0; j < p.dim(); ++j)
                worst = std::max(worst, std::fabs(p(i, j) - ref(i, j)));
        report("paths graph " + std::to_string(g) + ": cpm within 1e-10 of enumeration",
               worst <= 1e-10);
        report("paths graph " + std::to_string(g) + ": partition matches",
               std::fabs(log_partition(z, w) - family_log_partition(brute, log_w)) <= 1e-10);
    }

    os << (failures == 0 ? "oracle-check: all checks passed\n"
                         : "oracle-check: " + std::to_string(failures) + " check(s) failed\n");
    return failures == 0 ? 0 : 2;
}

}  // namespace detail

/// The command-line surface. Returns the process exit code:
/// 0 success, 1 usage, 2 validation, 3 runtime failure.
inline int cli_dispatch(int argc, const char* const* argv) {
    CLI::App app{
        "Adversarial combinatorial bandits on ZDD-compressed decision sets.\n"
        "Loss model of the built-in adversary: each round, with probability\n"
        "reset_prob the mean vector mu is redrawn uniformly from [0,1]^d; then\n"
        "h_i ~ Bernoulli(mu_i) is drawn per arm and loss_i = +1/d if h_i = 1,\n"
        "else -1/d."};
    app.require_subcommand(1);

    std::string graph_path, zdd_path, out_path, config_path, order = "bfs";
    int start_override = -1, goal_override = -1;
    int check_size = 8;
    std::uint64_t check_seed = 1;

    auto* build = app.add_subcommand("build-paths",
                                     "Build the ZDD of all simple s-t paths of a graph");
    build->add_option("graph", graph_path, "edge-list file")->required();
    build->add_option("out", out_path, "output .zdd file")->required();
    build->add_option("--start", start_override, "override the start node");
    build->add_option("--goal", goal_override, "override the goal node");
    build->add_option("--order", order,
                      "construction edge order: bfs (default) or input (identity)")
        ->check(CLI::IsMember({"bfs", "input"}));

    auto* cnt = app.add_subcommand("count", "Print |S| and the maximum super-arm size");
    cnt->add_option("zdd", zdd_path, ".zdd file")->required();

    auto* stats = app.add_subcommand("stats", "Print the bandit constants L and lambda, and |V|");
    stats->add_option("zdd", zdd_path, ".zdd file")->required();

    auto* runcmd = app.add_subcommand("run", "Run an experiment from a config file");
    runcmd->add_option("config", config_path, "flat key = value config")->required();

    auto* check = app.add_subcommand("oracle-check",
                                     "Cross-check the diagram pipeline against brute force");
    check->add_option("--size", check_size, "node count of the random instances")
        ->check(CLI::Range(4, 14));
    check->add_option("--seed", check_seed, "seed for the random instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::cout.flush();
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (build->parsed()) {
            Graph g = detail::load_graph_file(graph_path);
            const int s = start_override >= 0 ? start_override : g.start.value_or(0);
            const int t = goal_override >= 0 ? goal_override : g.goal.value_or(g.node_count() - 1);
            std::vector<int> edge_order;
            if (order == "input") {
                edge_order.resize(static_cast<std::size_t>(g.arm_count()));
                for (int k = 0; k < g.arm_count(); ++k)
                    edge_order[static_cast<std::size_t>(k)] = k + 1;
            }
            Zdd z = build_st_paths(g, s, t, edge_order);
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + out_path);
            write_zdd(z, out);
            std::cout << "wrote " << out_path << ": |S| = " << count(z)
                      << ", |V| = " << z.vertex_count() << "\n";
        } else if (cnt->parsed()) {
            Zdd z = detail::load_zdd_file(zdd_path);
            std::cout << "|S| = " << count(z) << "\n";
            std::cout << "max_cardinality = " << (z.root() == 0 ? 0 : max_cardinality(z))
                      << "\n";
        } else if (stats->parsed()) {
            Zdd z = detail::load_zdd_file(zdd_path);
            BanditState state(z, 3.0);
            std::cout << "L = " << std::sqrt(state.l2()) << "\n";
            std::cout << "lambda = " << state.lambda() << "\n";
            std::cout << "|V| = " << z.vertex_count() << "\n";
        } else if (runcmd->parsed()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot open config file: " + config_path);
            ExperimentConfig cfg = parse_config(in);
            ExperimentResult res = run_experiment(cfg);
            std::cout << "wrote " << res.csv_path << " and " << res.aggregate_path << "\n";
            if (!res.aggregate.empty()) {
                const AggregateRow& last = res.aggregate.back();
                std::cout << "final mean regret at t = " << last.t << ": " << last.mean_regret
                          << " (std " << last.std_regret << ")\n";
            }
        } else if (check->parsed()) {
            return detail::oracle_check(check_size, check_seed, std::cout);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace zddb
