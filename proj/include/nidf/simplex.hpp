#pragma once

#include "nidf/types.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace nidf {

/// Euclidean projection onto the probability simplex {x : x >= 0, sum x = 1}
/// by the sort-and-threshold rule.
inline Vector project_simplex(const Vector& v) {
    if (!v.allFinite()) throw InputError("project_simplex: input must be finite");
    const Index d = v.size();
    if (d == 0) throw InputError("project_simplex: empty vector");

    std::vector<double> u(v.data(), v.data() + d);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (Index j = 0; j < d; ++j) {
        cumsum += u[static_cast<std::size_t>(j)];
        const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (u[static_cast<std::size_t>(j)] - candidate > 0.0) theta = candidate;
    }
    return (v.array() - theta).cwiseMax(0.0);
}

/// Largest-eigenvalue estimate of a symmetric PSD matrix by power iteration
/// from a fixed pseudo-random start vector.
inline double spectral_norm_estimate(const Matrix& Q, int iters = 50) {
    const Index d = Q.rows();
    std::mt19937_64 rng(0x9d2c5680u);
    Vector v(d);
    for (Index i = 0; i < d; ++i)
        v[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    double vn = v.norm();
    if (vn == 0.0) return 0.0;
    v /= vn;
    double est = 0.0;
    for (int it = 0; it < iters; ++it) {
        Vector qv = Q * v;
        const double qn = qv.norm();
        if (qn <= 0.0) return 0.0;
        est = qn;
        v = qv / qn;
    }
    return est;
}

struct QpConfig {
    double tol = 1e-8;    // projected step norm
    int max_iter = 5000;
};

struct QpResult {
    Vector x;
    int iterations = 0;
    bool converged = false;
};

/// Minimize x^T Q x - c^T x over the probability simplex by projected
/// gradient descent: step 1/(2*Lhat) with Lhat the power-iteration spectral
/// estimate of Q (floored at 1e-12), started from the uniform vector.
/// Non-convergence is flagged; the best (last) iterate is still returned.
inline QpResult solve_simplex_qp(const Matrix& Q, const Vector& c, const QpConfig& cfg = {}) {
    const Index d = c.size();
    if (Q.rows() != d || Q.cols() != d) throw InputError("solve_simplex_qp: shape mismatch");
    if (!(cfg.tol > 0.0) || cfg.max_iter < 1) throw InputError("solve_simplex_qp: bad config");

    const double lhat = std::max(spectral_norm_estimate(Q), 1e-12);
    const double step = 1.0 / (2.0 * lhat);

    QpResult res;
    res.x = Vector::Constant(d, 1.0 / static_cast<double>(d));
    for (int it = 1; it <= cfg.max_iter; ++it) {
        const Vector grad = 2.0 * (Q * res.x) - c;
        Vector next = project_simplex(res.x - step * grad);
        const double move = (next - res.x).norm();
        res.x = std::move(next);
        res.iterations = it;
        if (move <= cfg.tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace nidf
