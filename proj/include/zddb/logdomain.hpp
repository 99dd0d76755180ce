#pragma once

#include <cmath>
#include <limits>

namespace zddb {

// Log-domain arithmetic. -inf is the additive identity (weight 0).
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace zddb
