#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "zddb/linalg.hpp"
#include "zddb/logdomain.hpp"
#include "zddb/rng.hpp"
#include "zddb/zdd.hpp"

// Weighted dynamic programs over a ZDD, all in log domain. The bandit's
// weights decay like exp of accumulated loss estimates, which underflows
// linear-domain products within a few hundred rounds; -inf stands for a
// hard-excluded arm and is the additive identity throughout.

namespace zddb {

/// Per-arm log-weights; exp of an entry is the w_i >= 0 of the constrained
/// distribution p(X) proportional to prod_{i in X} w_i.
struct WeightVector {
    std::vector<double> log_w;  // arm i lives at [i - 1]

    static WeightVector ones(int d) { return WeightVector{std::vector<double>(d, 0.0)}; }

    static WeightVector from_linear(const std::vector<double>& w) {
        WeightVector out;
        out.log_w.reserve(w.size());
        for (double x : w) {
            if (x < 0.0) throw std::invalid_argument("WeightVector: weights must be nonnegative");
            out.log_w.push_back(x == 0.0 ? kNegInf : std::log(x));
        }
        return out;
    }

    int dim() const { return static_cast<int>(log_w.size()); }
    double operator[](int arm) const { return log_w[arm - 1]; }  // 1-based arm index
};

// Log-domain per-vertex tables, indexed by vertex id.
using ForwardWeights = std::vector<double>;
using BackwardWeights = std::vector<double>;

// Probabilities in [0,1]; symmetric with P(i,i) = p(i in X).
using CpmMatrix = SymMatrix;

namespace detail {
inline void require_dim(const Zdd& z, const WeightVector& w, const char* who) {
    if (w.dim() != z.arm_count())
        throw std::invalid_argument(std::string(who) + ": weight vector has wrong length");
}
}  // namespace detail

/// F(v) = total weight of root-to-v routes; one top-down pass.
/// F(root) = log 1 and F(1) equals the log partition function.
inline ForwardWeights forward_weights(const Zdd& z, const WeightVector& w) {
    detail::require_dim(z, w, "forward_weights");
    ForwardWeights f(z.vertex_count(), kNegInf);
    f[z.root()] = 0.0;
    for (int v = z.vertex_count() - 1; v >= 2; --v) {
        if (f[v] == kNegInf) continue;
        f[z.lo(v)] = log_add_exp(f[z.lo(v)], f[v]);
        f[z.hi(v)] = log_add_exp(f[z.hi(v)], w[z.label(v)] + f[v]);
    }
    return f;
}

/// B(v) = total weight of v-to-1 routes; one bottom-up pass.
/// B(root) equals the log partition function.
inline BackwardWeights backward_weights(const Zdd& z, const WeightVector& w) {
    detail::require_dim(z, w, "backward_weights");
    BackwardWeights b(z.vertex_count(), kNegInf);
    if (z.vertex_count() > 1) b[1] = 0.0;
    for (int v = 2; v < z.vertex_count(); ++v)
        b[v] = log_add_exp(b[z.lo(v)], w[z.label(v)] + b[z.hi(v)]);
    return b;
}

/// log Z(w, S); -inf for an empty or zero-weight family.
inline double log_partition(const Zdd& z, const WeightVector& w) {
    return backward_weights(z, w)[z.root()];
}

/// Exact sample from the constrained distribution: walk down from the root
/// taking the 1-arc at v with probability w_lbl(v) * B(hi) / B(v).
inline SuperArm draw(const Zdd& z, const WeightVector& w, const BackwardWeights& b, Rng& rng) {
    detail::require_dim(z, w, "draw");
    if (b[z.root()] == kNegInf)
        throw std::invalid_argument("draw: family is empty or has zero total weight");
    SuperArm x;
    int v = z.root();
    while (!Zdd::is_terminal(v)) {
        const double theta = std::exp(w[z.label(v)] + b[z.hi(v)] - b[v]);
        if (bernoulli(theta, rng)) {
            x.push_back(z.label(v));
            v = z.hi(v);
        } else {
            v = z.lo(v);
        }
    }
    return x;
}

/// Backward weighted co-occurrence: C(v, j) = total weight of v-to-1 routes
/// whose set contains arm j. Dense |V| x d table of log values.
class BwcTable {
public:
    BwcTable(int vertex_count, int d)
        : d_(d), c_(static_cast<std::size_t>(vertex_count) * d, kNegInf) {}

    // arm j is 1-based
    double& at(int v, int j) { return c_[static_cast<std::size_t>(v) * d_ + (j - 1)]; }
    double at(int v, int j) const { return c_[static_cast<std::size_t>(v) * d_ + (j - 1)]; }
    int arm_count() const { return d_; }

private:
    int d_;
    std::vector<double> c_;
};

inline BwcTable bwc(const Zdd& z, const WeightVector& w, const BackwardWeights& b) {
    detail::require_dim(z, w, "bwc");
    const int d = z.arm_count();
    BwcTable c(z.vertex_count(), d);
    for (int v = 2; v < z.vertex_count(); ++v) {
        const int l = z.label(v);
        const double wl = w[l];
        c.at(v, l) = wl + b[z.hi(v)];
        for (int j = l + 1; j <= d; ++j)
            c.at(v, j) = log_add_exp(c.at(z.lo(v), j), wl + c.at(z.hi(v), j));
    }
    return c;
}

/// Full co-occurrence probability matrix of p(X; w, S):
/// P(i,i) = p(i in X) and P(i,j) = p(i in X, j in X). Each summand is a
/// probability contribution, so accumulation happens in linear domain after
/// exponentiating log differences.
inline CpmMatrix cpm(const Zdd& z, const WeightVector& w, const ForwardWeights& f,
                     const BackwardWeights& b, const BwcTable& c) {
    detail::require_dim(z, w, "cpm");
    const int d = z.arm_count();
    const double log_z = b[z.root()];
    if (log_z == kNegInf)
        throw std::invalid_argument("cpm: family is empty or has zero total weight");
    CpmMatrix p(d);
    for (int v = 2; v < z.vertex_count(); ++v) {
        const int i = z.label(v);
        const double stem = f[v] + w[i] - log_z;  // log of F(v) w_i / Z
        if (stem == kNegInf) continue;
        p(i - 1, i - 1) += std::exp(stem + b[z.hi(v)]);
        for (int j = i + 1; j <= d; ++j) {
            const double cj = c.at(z.hi(v), j);
            if (cj != kNegInf) p(i - 1, j - 1) += std::exp(stem + cj);
        }
    }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) p(j, i) = p(i, j);
    return p;
}

}  // namespace zddb
