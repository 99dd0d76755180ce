#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <istream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "zddb/builder.hpp"
#include "zddb/combwm.hpp"
#include "zddb/environments.hpp"
#include "zddb/graph.hpp"
#include "zddb/rng.hpp"
#include "zddb/weighted_dp.hpp"
#include "zddb/zdd.hpp"

namespace zddb {

struct ExperimentConfig {
    std::string problem;  // osp | dst | cg | custom-zdd
    int grid_rows = 0;
    int grid_cols = 0;
    std::string graph_file;
    std::string zdd_file;
    double alpha = 3.0;
    std::int64_t horizon = 0;
    int trials = 1;
    std::uint64_t seed = 0;
    double reset_prob = 0.1;
    double kappa = 10.0;
    int players = 2;
    std::string output;
};

/// Flat `key = value` lines; blank lines and #-comments are skipped.
inline ExperimentConfig parse_config(std::istream& is) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) -> void {
        throw std::invalid_argument("config parse error at line " + std::to_string(lineno) +
                                    ": " + what);
    };
    auto trim = [](std::string s) {
        const char* ws = " \t\r\n";
        auto b = s.find_first_not_of(ws);
        auto e = s.find_last_not_of(ws);
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) fail("expected `key = value`");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (value.empty()) fail("missing value for `" + key + "`");
        try {
            if (key == "problem")
                cfg.problem = value;
            else if (key == "grid_rows")
                cfg.grid_rows = std::stoi(value);
            else if (key == "grid_cols")
                cfg.grid_cols = std::stoi(value);
            else if (key == "graph_file")
                cfg.graph_file = value;
            else if (key == "zdd_file")
                cfg.zdd_file = value;
            else if (key == "alpha")
                cfg.alpha = std::stod(value);
            else if (key == "horizon")
                cfg.horizon = std::stoll(value);
            else if (key == "trials")
                cfg.trials = std::stoi(value);
            else if (key == "seed")
                cfg.seed = std::stoull(value);
            else if (key == "reset_prob")
                cfg.reset_prob = std::stod(value);
            else if (key == "kappa")
                cfg.kappa = std::stod(value);
            else if (key == "players")
                cfg.players = std::stoi(value);
            else if (key == "output")
                cfg.output = value;
            else
                fail("unknown key `" + key + "`");
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            fail("bad numeric value for `" + key + "`");
        }
    }
    return cfg;
}

inline void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& what) -> void {
        throw std::invalid_argument("config: " + what);
    };
    if (cfg.problem != "osp" && cfg.problem != "dst" && cfg.problem != "cg" &&
        cfg.problem != "custom-zdd")
        fail("problem must be one of osp, dst, cg, custom-zdd");
    if (cfg.horizon < 1) fail("horizon must be >= 1");
    if (cfg.trials < 1) fail("trials must be >= 1");
    if (cfg.alpha != 2.0 && cfg.alpha != 3.0) fail("alpha must be 2 or 3");
    if (cfg.output.empty()) fail("output path is required");
    if (cfg.reset_prob < 0.0 || cfg.reset_prob > 1.0) fail("reset_prob must lie in [0,1]");
    if (cfg.problem == "cg" && cfg.players < 1) fail("players must be >= 1");
    if (cfg.problem == "custom-zdd" && cfg.zdd_file.empty())
        fail("custom-zdd requires zdd_file");
    const bool has_grid = cfg.grid_rows >= 2 && cfg.grid_cols >= 2;
    if (cfg.problem != "custom-zdd" && cfg.zdd_file.empty() && cfg.graph_file.empty() &&
        !has_grid)
        fail("need a decision-set source: grid_rows/grid_cols, graph_file, or zdd_file");
}

/// Every round up to 10^4, then a geometric grid (12 points per decade,
/// which includes every power of ten) plus the final round.
inline std::vector<std::int64_t> logging_checkpoints(std::int64_t horizon) {
    std::vector<std::int64_t> cps;
    if (horizon <= 10000) {
        cps.resize(static_cast<std::size_t>(horizon));
        for (std::int64_t t = 1; t <= horizon; ++t) cps[static_cast<std::size_t>(t - 1)] = t;
        return cps;
    }
    for (int k = 0;; ++k) {
        const auto t =
            static_cast<std::int64_t>(std::llround(std::pow(10.0, static_cast<double>(k) / 12.0)));
        if (t > horizon) break;
        if (cps.empty() || cps.back() != t) cps.push_back(t);
    }
    if (cps.empty() || cps.back() != horizon) cps.push_back(horizon);
    return cps;
}

struct TrialRow {
    int trial;   // 0-based
    int player;  // 1-based
    std::int64_t t;
    double chosen_cost;
    double cum_cost;
    double best_fixed_cost;
    double regret;
};

namespace detail {

struct TrialOutput {
    std::vector<TrialRow> rows;
    double bookkeeping_gap = 0.0;  // congestion-game cross-check residue
};

inline void append_number(std::string& s, double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    s.append(buf, res.ptr);
}

constexpr std::uint64_t kStreamAdversary = 1;
constexpr std::uint64_t kStreamPolicyBase = 100;  // + player index

inline TrialOutput run_single_player_trial(const Zdd& zdd, const ExperimentConfig& cfg,
                                           int trial, const std::vector<std::int64_t>& cps) {
    ResetBernoulliAdversary adversary(zdd.arm_count(), cfg.reset_prob,
                                      derive_seed(cfg.seed, trial, kStreamAdversary));
    Rng policy_rng(derive_seed(cfg.seed, trial, kStreamPolicyBase + 1));
    RegretTrace trace = run(
        zdd, cfg.alpha, [&](std::int64_t) { return adversary.step(); }, cfg.horizon, policy_rng,
        &cps);
    TrialOutput out;
    out.rows.reserve(trace.checkpoints.size());
    for (const Checkpoint& cp : trace.checkpoints) {
        const double chosen = trace.rounds[static_cast<std::size_t>(cp.t - 1)].cost;
        out.rows.push_back({trial, 1, cp.t, chosen, cp.cum_cost, cp.best_fixed_cost, cp.regret});
    }
    return out;
}

inline TrialOutput run_congestion_trial(const BanditState& prototype,
                                        const std::vector<double>& beta,
                                        const ExperimentConfig& cfg, int trial,
                                        const std::vector<std::int64_t>& cps) {
    const Zdd& zdd = prototype.zdd();
    const int d = zdd.arm_count();
    const int m = cfg.players;
    CongestionEnv env(zdd, beta, m, cfg.kappa);

    std::vector<BanditState> states(m, prototype);
    std::vector<Rng> rngs;
    rngs.reserve(m);
    for (int k = 0; k < m; ++k)
        rngs.emplace_back(derive_seed(cfg.seed, trial, kStreamPolicyBase + 1 + k));

    std::vector<std::vector<double>> cum_loss(m, std::vector<double>(d, 0.0));
    std::vector<double> cum_cost(m, 0.0);
    TrialOutput out;
    std::size_t next_cp = 0;

    for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
        std::vector<SuperArm> joint(m);
        for (int k = 0; k < m; ++k) joint[k] = states[k].sample_action(rngs[k]);
        const auto losses = env.losses(joint);

        // Book both ways: per player, and independently per edge from the
        // occupancy counts. The two totals must agree.
        double total_by_player = 0.0;
        std::vector<double> cost(m, 0.0);
        for (int k = 0; k < m; ++k) {
            for (int i : joint[k]) cost[k] += losses[k][i - 1];
            total_by_player += cost[k];
            static std::atomic<bool> cost_warned{false};
            if (std::fabs(cost[k]) > 1.0 + 1e-12 && !cost_warned.exchange(true))
                std::cerr << "congestion game: |c_t| = " << std::fabs(cost[k])
                          << " exceeds 1; continuing (expected for contended paths)\n";
        }
        std::vector<int> occupancy(d, 0);
        for (int k = 0; k < m; ++k)
            for (int i : joint[k]) ++occupancy[i - 1];
        double total_by_edge = 0.0;
        for (int i = 0; i < d; ++i)
            if (occupancy[i] > 0)
                total_by_edge += occupancy[i] * beta[i] *
                                 std::pow(cfg.kappa, static_cast<double>(occupancy[i] - 1));
        out.bookkeeping_gap =
            std::max(out.bookkeeping_gap, std::fabs(total_by_player - total_by_edge));

        for (int k = 0; k < m; ++k) {
            const CpmMatrix p = states[k].mixture_cpm();
            const CpmMatrix p_pinv = pinv_symmetric(p);
            states[k].update_weights(estimate_loss(p_pinv, cost[k], joint[k]));
            cum_cost[k] += cost[k];
            for (int i = 0; i < d; ++i) cum_loss[k][i] += losses[k][i];
        }

        if (next_cp < cps.size() && cps[next_cp] == t) {
            ++next_cp;
            for (int k = 0; k < m; ++k) {
                const double best = min_additive_cost(zdd, cum_loss[k]).value;
                out.rows.push_back(
                    {trial, k + 1, t, cost[k], cum_cost[k], best, cum_cost[k] - best});
            }
        }
    }
    return out;
}

}  // namespace detail

struct AggregateRow {
    std::int64_t t;
    double mean_regret;
    double std_regret;
};

struct ExperimentResult {
    Zdd zdd;
    double l2 = 0.0;
    double lambda = 0.0;
    double family_size = 0.0;
    std::vector<TrialRow> rows;
    std::vector<AggregateRow> aggregate;
    double max_bookkeeping_gap = 0.0;
    std::string csv_path;
    std::string aggregate_path;
};

/// Builds or loads the decision set for a config. For cg the betas come with
/// it (unit lengths on grids, file values otherwise).
inline std::pair<Zdd, std::vector<double>> prepare_decision_set(const ExperimentConfig& cfg) {
    auto load_zdd = [&]() {
        std::ifstream in(cfg.zdd_file);
        if (!in) throw std::runtime_error("cannot open zdd file: " + cfg.zdd_file);
        return read_zdd(in);
    };
    auto load_graph = [&]() {
        std::ifstream in(cfg.graph_file);
        if (!in) throw std::runtime_error("cannot open graph file: " + cfg.graph_file);
        return read_graph(in);
    };

    if (cfg.problem == "custom-zdd") {
        Zdd z = load_zdd();
        return {z, std::vector<double>(z.arm_count(), 1.0)};
    }
    if (cfg.problem == "dst") {
        if (!cfg.zdd_file.empty()) {
            Zdd z = load_zdd();
            return {z, std::vector<double>(z.arm_count(), 1.0)};
        }
        Graph g = build_grid({cfg.grid_rows, cfg.grid_cols});
        Family trees = brute_force_steiner_trees(g, g.terminals);
        return {reduce_from_family(trees, g.arm_count()),
                std::vector<double>(g.arm_count(), 1.0)};
    }

    // osp and cg share the s-t path construction
    if (!cfg.zdd_file.empty()) {
        Zdd z = load_zdd();
        std::vector<double> beta(z.arm_count(), 1.0);
        if (!cfg.graph_file.empty()) {
            Graph g = load_graph();
            if (g.arm_count() != z.arm_count())
                throw std::invalid_argument("config: graph and zdd arm counts differ");
            beta = g.betas();
        }
        return {z, beta};
    }
    Graph g = cfg.graph_file.empty() ? build_grid({cfg.grid_rows, cfg.grid_cols}) : load_graph();
    const int s = g.start.value_or(0);
    const int t = g.goal.value_or(g.node_count() - 1);
    return {build_st_paths(g, s, t), g.betas()};
}

/// Runs the configured experiment: one policy instance per player, trials in
/// parallel on independent streams, rows written in trial order so the bytes
/// never depend on scheduling. Returns everything it wrote.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, int max_threads = 0) {
    validate_config(cfg);
    auto [zdd, beta] = prepare_decision_set(cfg);
    const std::vector<std::int64_t> cps = logging_checkpoints(cfg.horizon);

    BanditState prototype(zdd, cfg.alpha);

    std::vector<detail::TrialOutput> outputs(static_cast<std::size_t>(cfg.trials));
    {
        unsigned hw = std::thread::hardware_concurrency();
        if (hw == 0) hw = 1;
        const int want = max_threads > 0 ? max_threads : static_cast<int>(hw);
        const int n_threads = std::min(cfg.trials, std::max(1, want));
        std::atomic<int> next{0};
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
        auto worker = [&](int slot) {
            try {
                for (int trial; (trial = next.fetch_add(1)) < cfg.trials;) {
                    outputs[static_cast<std::size_t>(trial)] =
                        cfg.problem == "cg"
                            ? detail::run_congestion_trial(prototype, beta, cfg, trial, cps)
                            : detail::run_single_player_trial(zdd, cfg, trial, cps);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(slot)] = std::current_exception();
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker, i);
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    ExperimentResult res;
    res.zdd = zdd;
    res.l2 = prototype.l2();
    res.lambda = prototype.lambda();
    res.family_size = count(zdd).convert_to<double>();
    for (auto& out : outputs) {
        res.max_bookkeeping_gap = std::max(res.max_bookkeeping_gap, out.bookkeeping_gap);
        res.rows.insert(res.rows.end(), out.rows.begin(), out.rows.end());
    }

    // aggregate over (trial, player) per checkpoint, in fixed row order
    const int streams = cfg.problem == "cg" ? cfg.players : 1;
    res.aggregate.reserve(cps.size());
    for (std::size_t c = 0; c < cps.size(); ++c) {
        double sum = 0.0, sumsq = 0.0;
        std::size_t n = 0;
        for (int trial = 0; trial < cfg.trials; ++trial) {
            const auto& rows = outputs[static_cast<std::size_t>(trial)].rows;
            for (int k = 0; k < streams; ++k) {
                const auto& row = rows[c * static_cast<std::size_t>(streams) +
                                       static_cast<std::size_t>(k)];
                sum += row.regret;
                sumsq += row.regret * row.regret;
                ++n;
            }
        }
        const double mean = sum / static_cast<double>(n);
        const double var =
            n > 1 ? std::max(0.0, (sumsq - sum * mean) / static_cast<double>(n - 1)) : 0.0;
        res.aggregate.push_back({cps[c], mean, std::sqrt(var)});
    }

    // per-round CSV
    if (!cfg.output.empty()) {
        std::string body = "trial,player,t,chosen_cost,cum_cost,best_fixed_cost,regret\n";
        for (const auto& row : res.rows) {
            body += std::to_string(row.trial);
            body += ',';
            body += std::to_string(row.player);
            body += ',';
            body += std::to_string(row.t);
            body += ',';
            detail::append_number(body, row.chosen_cost);
            body += ',';
            detail::append_number(body, row.cum_cost);
            body += ',';
            detail::append_number(body, row.best_fixed_cost);
            body += ',';
            detail::append_number(body, row.regret);
            body += '\n';
        }
        std::ofstream out(cfg.output, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write output file: " + cfg.output);
        out << body;

        std::string agg_path = cfg.output;
        if (agg_path.size() > 4 && agg_path.substr(agg_path.size() - 4) == ".csv")
            agg_path = agg_path.substr(0, agg_path.size() - 4);
        agg_path += ".agg.csv";
        std::string agg = "t,mean_regret,std_regret\n";
        for (const auto& row : res.aggregate) {
            agg += std::to_string(row.t);
            agg += ',';
            detail::append_number(agg, row.mean_regret);
            agg += ',';
            detail::append_number(agg, row.std_regret);
            agg += '\n';
        }
        std::ofstream agg_out(agg_path, std::ios::binary);
        if (!agg_out) throw std::runtime_error("cannot write aggregate file: " + agg_path);
        agg_out << agg;
        res.csv_path = cfg.output;
        res.aggregate_path = agg_path;
    }
    return res;
}

}  // namespace zddb
