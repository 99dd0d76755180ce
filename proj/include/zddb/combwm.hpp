#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "zddb/linalg.hpp"
#include "zddb/weighted_dp.hpp"
#include "zddb/zdd.hpp"

// The any-time combinatorial bandit policy: exponential weights with a
// per-round exponent rescaling, run entirely on the compressed decision set.
// Every per-round quantity (sampling, co-occurrence matrix, loss estimate)
// comes out of the weighted DPs, so the cost per round is O(d |V|) plus one
// d x d eigendecomposition.

namespace zddb {

struct Schedule {
    double gamma;  // exploration mixture rate, in (0, 1/2]
    double eta;    // learning rate
};

/// gamma_t = t^{-1/alpha} / 2 and eta_t = lambda t^{-1/alpha} / (2 L^2).
/// Note eta_t / gamma_t = lambda / L^2 independent of t.
inline Schedule schedule(std::int64_t t, double alpha, double lambda, double l2) {
    if (t < 1) throw std::invalid_argument("schedule: round index must be >= 1");
    if (alpha <= 0.0 || lambda <= 0.0 || l2 <= 0.0)
        throw std::invalid_argument("schedule: alpha, lambda, L^2 must be positive");
    const double decay = std::pow(static_cast<double>(t), -1.0 / alpha);
    return Schedule{0.5 * decay, 0.5 * lambda * decay / l2};
}

using LossEstimate = std::vector<double>;

/// lhat = c_t * P_t^+ 1_{X_t}: the importance-style estimate of the hidden
/// loss vector from the single observed cost.
inline LossEstimate estimate_loss(const CpmMatrix& p_pinv, double cost, const SuperArm& action) {
    const int d = p_pinv.dim();
    for (int i : action)
        if (i < 1 || i > d) throw std::invalid_argument("estimate_loss: action/matrix mismatch");
    LossEstimate lhat(d, 0.0);
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int j : action) s += p_pinv(i, j - 1);
        lhat[i] = cost * s;
    }
    return lhat;
}

/// One sample from the mixture (1 - gamma) p(.; w, S) + gamma p(.; 1, S):
/// pick the component with a Bernoulli(gamma) flip, then sample that
/// constrained distribution exactly.
inline SuperArm draw_mixture(const Zdd& z, const WeightVector& w, const BackwardWeights& b_w,
                             const BackwardWeights& b_uniform, double gamma, Rng& rng) {
    if (bernoulli(gamma, rng)) return draw(z, WeightVector::ones(z.arm_count()), b_uniform, rng);
    return draw(z, w, b_w, rng);
}

/// P = (1 - gamma) * cpm(w) + gamma * uniform_cpm. Uniform weights short-
/// circuit: both components coincide, so P is the uniform matrix itself.
inline CpmMatrix mixture_cpm(const Zdd& z, const WeightVector& w, double gamma,
                             const CpmMatrix& uniform_cpm) {
    bool is_uniform = true;
    for (double lw : w.log_w)
        if (lw != 0.0) {
            is_uniform = false;
            break;
        }
    if (is_uniform) return uniform_cpm;

    BackwardWeights b = backward_weights(z, w);
    ForwardWeights f = forward_weights(z, w);
    BwcTable c = bwc(z, w, b);
    CpmMatrix q = cpm(z, w, f, b, c);
    const int d = z.arm_count();
    CpmMatrix p(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) p(i, j) = (1.0 - gamma) * q(i, j) + gamma * uniform_cpm(i, j);
    return p;
}

class BanditState {
public:
    /// Computes the decision-set constants once: L^2 as the maximum super
    /// arm cardinality and lambda as the smallest nonzero eigenvalue of the
    /// uniform co-occurrence matrix. Both are properties of S alone, so the
    /// uniform-side tables are cached for the whole run.
    BanditState(const Zdd& zdd, double alpha) : zdd_(&zdd), alpha_(alpha) {
        if (alpha <= 0.0) throw std::invalid_argument("BanditState: alpha must be positive");
        if (zdd.root() == 0) throw std::invalid_argument("BanditState: empty decision set");
        l2_ = static_cast<double>(max_cardinality(zdd));
        if (l2_ == 0.0)
            throw std::invalid_argument("BanditState: degenerate decision set {{}}; no arm is ever observed");
        const int d = zdd.arm_count();
        log_wt_.assign(d, 0.0);  // unit weights at t = 1

        const WeightVector ones = WeightVector::ones(d);
        uniform_b_ = backward_weights(zdd, ones);
        ForwardWeights f = forward_weights(zdd, ones);
        BwcTable c = bwc(zdd, ones, uniform_b_);
        uniform_cpm_ = cpm(zdd, ones, f, uniform_b_, c);
        lambda_ = smallest_nonzero_eigenvalue(uniform_cpm_);
    }

    const Zdd& zdd() const { return *zdd_; }
    double alpha() const { return alpha_; }
    std::int64_t round() const { return t_; }
    double l2() const { return l2_; }
    double lambda() const { return lambda_; }
    const CpmMatrix& uniform_cpm() const { return uniform_cpm_; }
    const std::vector<double>& log_weights() const { return log_wt_; }

    Schedule current_schedule() const { return schedule(t_, alpha_, lambda_, l2_); }

    /// X_t from the round-t mixture distribution.
    SuperArm sample_action(Rng& rng) {
        ensure_backward();
        return draw_mixture(*zdd_, weights(), wt_b_, uniform_b_, current_schedule().gamma, rng);
    }

    /// P_t = (1 - gamma_t) Q_t + gamma_t U, with Q_t the co-occurrence
    /// matrix of the current modified weights.
    CpmMatrix mixture_cpm() {
        return zddb::mixture_cpm(*zdd_, weights(), current_schedule().gamma, uniform_cpm_);
    }

    /// Step-8 update: log w_{t+1,i} = (eta_{t+1}/eta_t) log w_{t,i}
    /// - eta_{t+1} lhat_i, then advance the round. Equivalently
    /// log w_{t+1,i} = -eta_{t+1} sum_{t' <= t} lhat_{t',i}.
    void update_weights(const LossEstimate& lhat) {
        check_estimate(lhat);
        const double eta_t = schedule(t_, alpha_, lambda_, l2_).eta;
        const double eta_next = schedule(t_ + 1, alpha_, lambda_, l2_).eta;
        const double rescale = eta_next / eta_t;
        for (std::size_t i = 0; i < log_wt_.size(); ++i)
            log_wt_[i] = rescale * log_wt_[i] - eta_next * lhat[i];
        advance();
    }

    /// The fixed-rate baseline update w_{t+1,i} = w_{t,i} exp(-eta lhat_i),
    /// i.e. the policy without the exponent rescaling.
    void update_weights_fixed_rate(const LossEstimate& lhat, double eta) {
        check_estimate(lhat);
        for (std::size_t i = 0; i < log_wt_.size(); ++i) log_wt_[i] -= eta * lhat[i];
        advance();
    }

private:
    WeightVector weights() const { return WeightVector{log_wt_}; }

    void check_estimate(const LossEstimate& lhat) const {
        if (static_cast<int>(lhat.size()) != zdd_->arm_count())
            throw std::invalid_argument("update_weights: estimate has wrong length");
    }

    void advance() {
        ++t_;
        wt_b_valid_ = false;
    }

    void ensure_backward() {
        if (!wt_b_valid_) {
            wt_b_ = backward_weights(*zdd_, weights());
            wt_b_valid_ = true;
        }
    }

    const Zdd* zdd_;
    double alpha_;
    std::int64_t t_ = 1;
    std::vector<double> log_wt_;
    double l2_ = 0.0;
    double lambda_ = 0.0;
    CpmMatrix uniform_cpm_{1};
    BackwardWeights uniform_b_;

    BackwardWeights wt_b_;  // backward table under the current weights
    bool wt_b_valid_ = false;
};

struct RoundRecord {
    SuperArm action;
    double cost;
    double cum_cost;
};

struct Checkpoint {
    std::int64_t t;
    double cum_cost;
    double best_fixed_cost;  // min over S of the cumulative true loss
    double regret;           // cum_cost - best_fixed_cost
};

struct RegretTrace {
    std::vector<RoundRecord> rounds;
    std::vector<Checkpoint> checkpoints;
};

/// Runs the policy against an environment for `horizon` rounds. The
/// environment is any callable t -> loss vector; the policy itself only ever
/// sees the scalar cost of its chosen super arm. Regret is settled post hoc
/// from the accumulated true losses at each requested checkpoint (every
/// round when none are given).
template <typename LossFn>
RegretTrace run(const Zdd& zdd, double alpha, LossFn&& losses, std::int64_t horizon,
                Rng& policy_rng, const std::vector<std::int64_t>* checkpoints = nullptr) {
    BanditState state(zdd, alpha);
    const int d = zdd.arm_count();
    RegretTrace trace;
    trace.rounds.reserve(static_cast<std::size_t>(horizon));
    std::vector<double> cum_loss(d, 0.0);
    double cum_cost = 0.0;
    std::size_t next_cp = 0;
    bool warned = false;

    for (std::int64_t t = 1; t <= horizon; ++t) {
        const std::vector<double> loss = losses(t);
        if (static_cast<int>(loss.size()) != d)
            throw std::invalid_argument("run: environment produced a loss vector of wrong length");

        const SuperArm action = state.sample_action(policy_rng);
        double cost = 0.0;
        for (int i : action) cost += loss[i - 1];
        if (!warned && std::fabs(cost) > 1.0 + 1e-12) {
            std::cerr << "combwm: |c_t| = " << std::fabs(cost)
                      << " exceeds 1 at round " << t
                      << "; continuing (the guarantee degrades gracefully)\n";
            warned = true;
        }

        const CpmMatrix p = state.mixture_cpm();
        const CpmMatrix p_pinv = pinv_symmetric(p);
        state.update_weights(estimate_loss(p_pinv, cost, action));

        cum_cost += cost;
        for (int i = 0; i < d; ++i) cum_loss[i] += loss[i];
        trace.rounds.push_back({action, cost, cum_cost});

        const bool log_now = checkpoints == nullptr
                                 ? true
                                 : (next_cp < checkpoints->size() && (*checkpoints)[next_cp] == t);
        if (log_now) {
            if (checkpoints != nullptr) ++next_cp;
            const double best = min_additive_cost(zdd, cum_loss).value;
            trace.checkpoints.push_back({t, cum_cost, best, cum_cost - best});
        }
    }
    return trace;
}

/// Leading term of the high-probability regret bound (alpha = 3):
/// (3 d (e-2) lambda / (4 L^2) + 3/2 + L sqrt(7/lambda ln((K+2)/delta))) T^{2/3}.
/// The o(T^{2/3}) remainder is omitted, so comparisons are conservative.
inline double bound_highprob(int d, double lambda, double l, double family_size, double delta,
                             double horizon) {
    if (d < 1 || lambda <= 0.0 || l <= 0.0 || family_size < 1.0 || horizon < 1.0)
        throw std::invalid_argument("bound_highprob: inputs must be positive");
    if (delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("bound_highprob: delta must lie in (0,1)");
    const double e_minus_2 = std::exp(1.0) - 2.0;
    const double l2 = l * l;
    const double coef = 3.0 * d * e_minus_2 * lambda / (4.0 * l2) + 1.5 +
                        l * std::sqrt(7.0 / lambda * std::log((family_size + 2.0) / delta));
    return coef * std::pow(horizon, 2.0 / 3.0);
}

/// Leading term of the expected regret bound (alpha = 2):
/// (2 L^2 ln K / lambda + (e-2) d lambda / L^2 + 2) sqrt(T).
inline double bound_expected(int d, double lambda, double l, double family_size, double horizon) {
    if (d < 1 || lambda <= 0.0 || l <= 0.0 || family_size < 1.0 || horizon < 1.0)
        throw std::invalid_argument("bound_expected: inputs must be positive");
    const double e_minus_2 = std::exp(1.0) - 2.0;
    const double l2 = l * l;
    const double coef =
        2.0 * l2 * std::log(family_size) / lambda + e_minus_2 * d * lambda / l2 + 2.0;
    return coef * std::sqrt(horizon);
}

}  // namespace zddb
