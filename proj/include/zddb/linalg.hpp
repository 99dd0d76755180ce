#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace zddb {

/// Dense square matrix with symmetric intent; storage is full row-major.
class SymMatrix {
public:
    explicit SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
        if (n < 1) throw std::invalid_argument("SymMatrix: dimension must be positive");
    }

    static SymMatrix identity(int n) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    double max_asymmetry() const {
        double worst = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                worst = std::max(worst, std::fabs((*this)(i, j) - (*this)(j, i)));
        return worst;
    }

    friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

private:
    int n_;
    std::vector<double> a_;
};

inline std::vector<double> mat_vec(const SymMatrix& m, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != m.dim())
        throw std::invalid_argument("mat_vec: dimension mismatch");
    std::vector<double> y(m.dim(), 0.0);
    for (int i = 0; i < m.dim(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.dim(); ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

struct EigenDecomposition {
    std::vector<double> values;  // unordered
    SymMatrix vectors;           // column k is the eigenvector for values[k]
};

/// Cyclic threshold Jacobi eigendecomposition for symmetric matrices.
/// Rotations run until every off-diagonal entry is driven to exact zero
/// (negligible entries are flushed once convergence sets in), which keeps
/// the decomposition residual at the rounding floor; that accuracy is what
/// lets the pseudo-inverse meet its Penrose tolerances on ill-conditioned
/// inputs. Intended for d up to a few hundred.
inline EigenDecomposition jacobi_eigendecompose(const SymMatrix& input) {
    const int n = input.dim();
    SymMatrix a = input;
    SymMatrix q = SymMatrix::identity(n);

    for (int sweep = 1; sweep <= 100; ++sweep) {
        double off_sum = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int r = p + 1; r < n; ++r) off_sum += std::fabs(a(p, r));
        if (off_sum == 0.0) break;

        const double thresh = sweep < 4 ? 0.2 * off_sum / (n * n) : 0.0;
        for (int p = 0; p < n - 1; ++p) {
            for (int r = p + 1; r < n; ++r) {
                const double g = 100.0 * std::fabs(a(p, r));
                if (sweep > 4 && std::fabs(a(p, p)) + g == std::fabs(a(p, p)) &&
                    std::fabs(a(r, r)) + g == std::fabs(a(r, r))) {
                    a(p, r) = 0.0;
                    a(r, p) = 0.0;
                    continue;
                }
                if (std::fabs(a(p, r)) <= thresh) continue;

                const double apr = a(p, r);
                const double h = a(r, r) - a(p, p);
                double t;
                if (std::fabs(h) + g == std::fabs(h)) {
                    t = apr / h;
                } else {
                    const double theta = 0.5 * h / apr;
                    t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a(p, p) -= t * apr;
                a(r, r) += t * apr;
                a(p, r) = 0.0;
                a(r, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == r) continue;
                    const double akp = a(k, p), akr = a(k, r);
                    a(k, p) = akp - s * (akr + tau * akp);
                    a(p, k) = a(k, p);
                    a(k, r) = akr + s * (akp - tau * akr);
                    a(r, k) = a(k, r);
                }
                for (int k = 0; k < n; ++k) {
                    const double qkp = q(k, p), qkr = q(k, r);
                    q(k, p) = qkp - s * (qkr + tau * qkp);
                    q(k, r) = qkr + s * (qkp - tau * qkr);
                }
            }
        }
    }

    EigenDecomposition out{std::vector<double>(n), std::move(q)};
    for (int i = 0; i < n; ++i) out.values[i] = a(i, i);
    return out;
}

namespace detail {
inline void require_symmetric(const SymMatrix& m, const char* who) {
    if (m.max_asymmetry() > 1e-12)
        throw std::invalid_argument(std::string(who) + ": input is not symmetric");
}
}  // namespace detail

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix via
/// eigendecomposition. Eigenvalues at or below rel_tol * lambda_max are
/// treated as zero rank and inverted to 0.
inline SymMatrix pinv_symmetric(const SymMatrix& m, double rel_tol = 1e-9) {
    detail::require_symmetric(m, "pinv_symmetric");
    EigenDecomposition eig = jacobi_eigendecompose(m);
    const int n = m.dim();
    double lam_max = 0.0;
    for (double v : eig.values) lam_max = std::max(lam_max, std::fabs(v));
    const double cut = rel_tol * lam_max;

    std::vector<double> inv(n, 0.0);
    for (int k = 0; k < n; ++k)
        if (std::fabs(eig.values[k]) > cut) inv[k] = 1.0 / eig.values[k];

    SymMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += eig.vectors(i, k) * inv[k] * eig.vectors(j, k);
            out(i, j) = s;
            out(j, i) = s;
        }
    return out;
}

/// Smallest eigenvalue above the rank cut rel_tol * lambda_max. Throws when
/// every eigenvalue sits at or below the cut (the zero matrix).
inline double smallest_nonzero_eigenvalue(const SymMatrix& m, double rel_tol = 1e-9) {
    detail::require_symmetric(m, "smallest_nonzero_eigenvalue");
    EigenDecomposition eig = jacobi_eigendecompose(m);
    double lam_max = 0.0;
    for (double v : eig.values) lam_max = std::max(lam_max, std::fabs(v));
    const double cut = rel_tol * lam_max;
    double best = std::numeric_limits<double>::infinity();
    for (double v : eig.values)
        if (v > cut) best = std::min(best, v);
    if (!std::isfinite(best))
        throw std::invalid_argument("smallest_nonzero_eigenvalue: matrix has no nonzero eigenvalue");
    return best;
}

}  // namespace zddb
