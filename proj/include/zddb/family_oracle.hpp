#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "zddb/linalg.hpp"
#include "zddb/logdomain.hpp"
#include "zddb/zdd.hpp"

// Reference computations over explicit families, by direct summation.
// These are the independent oracles the ZDD dynamic programs are checked
// against; they never touch the diagram code paths.

namespace zddb {

inline double family_member_log_weight(const SuperArm& x, const std::vector<double>& log_w) {
    double s = 0.0;
    for (int i : x) s += log_w[i - 1];
    return s;
}

inline double family_log_partition(const Family& fam, const std::vector<double>& log_w) {
    double z = kNegInf;
    for (const auto& x : fam) z = log_add_exp(z, family_member_log_weight(x, log_w));
    return z;
}

inline std::vector<double> family_distribution(const Family& fam,
                                               const std::vector<double>& log_w) {
    const double z = family_log_partition(fam, log_w);
    if (z == kNegInf)
        throw std::invalid_argument("family_distribution: zero total weight");
    std::vector<double> p;
    p.reserve(fam.size());
    for (const auto& x : fam) p.push_back(std::exp(family_member_log_weight(x, log_w) - z));
    return p;
}

inline SymMatrix family_cpm(const Family& fam, const std::vector<double>& log_w, int d) {
    const std::vector<double> p = family_distribution(fam, log_w);
    SymMatrix m(d);
    for (std::size_t k = 0; k < fam.size(); ++k)
        for (int i : fam[k])
            for (int j : fam[k]) m(i - 1, j - 1) += p[k];
    return m;
}

inline double family_min_cost(const Family& fam, const std::vector<double>& cost) {
    if (fam.empty()) throw std::invalid_argument("family_min_cost: empty family");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : fam) {
        double s = 0.0;
        for (int i : x) s += cost[i - 1];
        best = std::min(best, s);
    }
    return best;
}

inline int family_max_cardinality(const Family& fam) {
    if (fam.empty()) throw std::invalid_argument("family_max_cardinality: empty family");
    std::size_t best = 0;
    for (const auto& x : fam) best = std::max(best, x.size());
    return static_cast<int>(best);
}

}  // namespace zddb
