#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "zddb/rng.hpp"
#include "zddb/zdd.hpp"

namespace zddb {

/// Piecewise-stochastic adversary: each arm's loss sign is Bernoulli with
/// mean mu_i, and the whole mean vector is secretly redrawn from [0,1]^d
/// with probability reset_prob each round to foil trackers. Losses are
/// exactly +1/d when the Bernoulli draw h_i comes up 1 and -1/d otherwise
/// (h is drawn per arm; see the CLI help for that reading).
class ResetBernoulliAdversary {
public:
    ResetBernoulliAdversary(int d, double reset_prob, std::uint64_t seed)
        : d_(d), reset_prob_(reset_prob), rng_(seed) {
        if (d < 1) throw std::invalid_argument("adversary: arm count must be positive");
        if (reset_prob < 0.0 || reset_prob > 1.0)
            throw std::invalid_argument("adversary: reset probability must lie in [0,1]");
        mu_.resize(d);
        redraw_mu();
    }

    // Fixed initial mean vector, for tests.
    ResetBernoulliAdversary(std::vector<double> mu0, double reset_prob, std::uint64_t seed)
        : d_(static_cast<int>(mu0.size())), reset_prob_(reset_prob), mu_(std::move(mu0)),
          rng_(seed) {
        for (double m : mu_)
            if (m < 0.0 || m > 1.0)
                throw std::invalid_argument("adversary: mu entries must lie in [0,1]");
    }

    const std::vector<double>& mu() const { return mu_; }

    /// Loss vector for the next round. Round 1 uses the initial mu; from
    /// round 2 on, the reset draw happens before the losses are emitted.
    std::vector<double> step() {
        if (!first_) {
            if (uniform01(rng_) < reset_prob_) redraw_mu();
        }
        first_ = false;
        std::vector<double> loss(d_);
        const double unit = 1.0 / static_cast<double>(d_);
        for (int i = 0; i < d_; ++i) loss[i] = bernoulli(mu_[i], rng_) ? unit : -unit;
        return loss;
    }

private:
    void redraw_mu() {
        for (int i = 0; i < d_; ++i) mu_[i] = uniform01(rng_);
    }

    int d_;
    double reset_prob_;
    std::vector<double> mu_;
    Rng rng_;
    bool first_ = true;
};

/// Congestion-game losses: the cost of edge i for player k is
/// beta_i * kappa^(number of OTHER players occupying i this round), so
/// contention inflates travel time exponentially.
class CongestionEnv {
public:
    CongestionEnv(const Zdd& zdd, std::vector<double> beta, int players, double kappa)
        : zdd_(&zdd), beta_(std::move(beta)), players_(players), kappa_(kappa) {
        if (players < 1) throw std::invalid_argument("congestion env: need at least one player");
        if (kappa < 0.0) throw std::invalid_argument("congestion env: kappa must be nonnegative");
        if (static_cast<int>(beta_.size()) != zdd.arm_count())
            throw std::invalid_argument("congestion env: beta length must match arm count");
    }

    int players() const { return players_; }
    double kappa() const { return kappa_; }
    const std::vector<double>& beta() const { return beta_; }

    /// Per-player loss vectors for one round of joint choices.
    std::vector<std::vector<double>> losses(const std::vector<SuperArm>& joint) const {
        if (static_cast<int>(joint.size()) != players_)
            throw std::invalid_argument("congestion env: expected one choice per player");
        const int d = zdd_->arm_count();
        for (const SuperArm& x : joint)
            if (!contains(*zdd_, x))
                throw std::invalid_argument("congestion env: a choice is not in the decision set");

        std::vector<int> occupancy(d, 0);
        std::vector<std::vector<char>> picked(players_, std::vector<char>(d, 0));
        for (int k = 0; k < players_; ++k)
            for (int i : joint[k]) {
                ++occupancy[i - 1];
                picked[k][i - 1] = 1;
            }

        std::vector<std::vector<double>> out(players_, std::vector<double>(d));
        for (int k = 0; k < players_; ++k)
            for (int i = 0; i < d; ++i) {
                const int others = occupancy[i] - picked[k][i];
                out[k][i] = beta_[i] * std::pow(kappa_, static_cast<double>(others));
            }
        return out;
    }

private:
    const Zdd* zdd_;
    std::vector<double> beta_;
    int players_;
    double kappa_;
};

}  // namespace zddb
