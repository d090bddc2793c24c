#pragma once

#include "nidf/simplex.hpp"
#include "nidf/types.hpp"

#include <numeric>
#include <vector>

namespace nidf {

/// Alternating-solver knobs. Outer convergence is relative change in lambda.
struct FusionConfig {
    double outer_tol = 1e-6;
    int outer_max_iter = 100;
    double qp_tol = 1e-8;
    int qp_max_iter = 5000;
    double lambda_floor = 0.0;

    void validate() const {
        if (!(outer_tol > 0.0) || !(qp_tol > 0.0)) throw InputError("fusion tolerances must be positive");
        if (outer_max_iter < 1 || qp_max_iter < 1) throw InputError("fusion iteration caps must be >= 1");
        if (lambda_floor < 0.0) throw InputError("lambda_floor must be nonnegative");
    }

    QpConfig qp() const { return {qp_tol, qp_max_iter}; }
};

/// Joint state of the alternating solve: the balance scalar lambda, the fused
/// feature score z (on the d-simplex) and the view weights w (on the v-simplex).
struct FusionState {
    double lambda = 0.0;
    Vector z;
    Vector w;
    int iterations = 0;
    std::vector<double> objective_history;  // after every block update
    bool converged = false;
    int qp_failures = 0;  // QP solves that hit max_iter without meeting tol
};

namespace detail {
inline void check_fusion_shapes(const std::vector<Matrix>& A_list, const std::vector<Vector>& s_list) {
    if (A_list.empty() || A_list.size() != s_list.size())
        throw InputError("fusion: need v >= 1 aligned redundancy/score pairs");
    const Index d = s_list[0].size();
    for (std::size_t i = 0; i < A_list.size(); ++i) {
        if (s_list[i].size() != d || A_list[i].rows() != d || A_list[i].cols() != d)
            throw InputError("fusion: shape mismatch in view " + std::to_string(i));
    }
}
}  // namespace detail

/// J = lambda^2 * sum_i w_i^2 z^T A_i z  -  lambda * sum_i w_i z^T s_i.
inline double objective(double lambda, const Vector& z, const Vector& w,
                        const std::vector<Matrix>& A_list, const std::vector<Vector>& s_list) {
    detail::check_fusion_shapes(A_list, s_list);
    if (static_cast<std::size_t>(w.size()) != A_list.size())
        throw InputError("fusion: weight vector does not match view count");
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < A_list.size(); ++i) {
        quad += w[static_cast<Index>(i)] * w[static_cast<Index>(i)] * z.dot(A_list[i] * z);
        lin += w[static_cast<Index>(i)] * z.dot(s_list[i]);
    }
    return lambda * lambda * quad - lambda * lin;
}

/// A = sum_i w_i^2 A_i, s = sum_i w_i s_i.
inline std::pair<Matrix, Vector> aggregate(const std::vector<Matrix>& A_list,
                                           const std::vector<Vector>& s_list, const Vector& w) {
    detail::check_fusion_shapes(A_list, s_list);
    if (static_cast<std::size_t>(w.size()) != A_list.size())
        throw InputError("aggregate: weight vector does not match view count");
    const Index d = s_list[0].size();
    Matrix A = Matrix::Zero(d, d);
    Vector s = Vector::Zero(d);
    for (std::size_t i = 0; i < A_list.size(); ++i) {
        const double wi = w[static_cast<Index>(i)];
        A += wi * wi * A_list[i];
        s += wi * s_list[i];
    }
    return {std::move(A), std::move(s)};
}

/// Closed-form balance update lambda = z^T s / (2 z^T A z); when the
/// curvature z^T A z degenerates the floor value is returned.
inline double update_lambda(const Vector& z, const Matrix& A, const Vector& s,
                            double lambda_floor = 0.0) {
    const double curvature = z.dot(A * z);
    if (curvature < 1e-12) return lambda_floor;
    return z.dot(s) / (2.0 * curvature);
}

/// Minimize lambda * z^T A z - z^T s over the d-simplex. lambda = 0 turns the
/// problem into an LP whose solution is the vertex at argmax s (lowest index wins).
inline QpResult update_z(double lambda, const Matrix& A, const Vector& s, const FusionConfig& cfg) {
    if (lambda == 0.0) {
        Index best;
        s.maxCoeff(&best);  // Eigen returns the first maximizer
        QpResult res;
        res.x = Vector::Zero(s.size());
        res.x[best] = 1.0;
        res.converged = true;
        return res;
    }
    return solve_simplex_qp(lambda * A, s, cfg.qp());
}

/// H_ii = z^T A_i z and f_i = z^T s_i, sized by the view count.
inline std::pair<Vector, Vector> build_weight_system(const Vector& z,
                                                     const std::vector<Matrix>& A_list,
                                                     const std::vector<Vector>& s_list) {
    detail::check_fusion_shapes(A_list, s_list);
    const auto v = static_cast<Index>(A_list.size());
    Vector H(v), f(v);
    for (Index i = 0; i < v; ++i) {
        H[i] = z.dot(A_list[static_cast<std::size_t>(i)] * z);
        f[i] = z.dot(s_list[static_cast<std::size_t>(i)]);
    }
    return {std::move(H), std::move(f)};
}

/// Minimize lambda * w^T H w - f^T w over the v-simplex (H diagonal).
inline QpResult update_w(double lambda, const Vector& H_diag, const Vector& f,
                         const FusionConfig& cfg) {
    if (H_diag.size() != f.size()) throw InputError("update_w: shape mismatch");
    if (lambda == 0.0) {
        Index best;
        f.maxCoeff(&best);
        QpResult res;
        res.x = Vector::Zero(f.size());
        res.x[best] = 1.0;
        res.converged = true;
        return res;
    }
    const Matrix Q = (lambda * H_diag).asDiagonal();
    return solve_simplex_qp(Q, f, cfg.qp());
}

/// Alternate the closed-form lambda update with the two simplex QPs until
/// lambda's relative change drops below outer_tol.
inline FusionState run_nidf(const std::vector<Matrix>& A_list, const std::vector<Vector>& s_list,
                            const FusionConfig& cfg = {}) {
    cfg.validate();
    detail::check_fusion_shapes(A_list, s_list);
    const Index d = s_list[0].size();
    const auto v = static_cast<Index>(A_list.size());

    FusionState st;
    st.z = Vector::Constant(d, 1.0 / static_cast<double>(d));
    st.w = Vector::Constant(v, 1.0 / static_cast<double>(v));

    double lambda_prev = 0.0;
    for (int it = 1; it <= cfg.outer_max_iter; ++it) {
        auto [A, s] = aggregate(A_list, s_list, st.w);

        st.lambda = update_lambda(st.z, A, s, cfg.lambda_floor);
        st.objective_history.push_back(objective(st.lambda, st.z, st.w, A_list, s_list));

        QpResult zres = update_z(st.lambda, A, s, cfg);
        if (!zres.converged) ++st.qp_failures;
        st.z = std::move(zres.x);
        st.objective_history.push_back(objective(st.lambda, st.z, st.w, A_list, s_list));

        auto [H, f] = build_weight_system(st.z, A_list, s_list);
        QpResult wres = update_w(st.lambda, H, f, cfg);
        if (!wres.converged) ++st.qp_failures;
        st.w = std::move(wres.x);
        st.objective_history.push_back(objective(st.lambda, st.z, st.w, A_list, s_list));

        st.iterations = it;
        if (it > 1) {
            const double rel = std::abs(st.lambda - lambda_prev) / std::max(1.0, std::abs(lambda_prev));
            if (rel < cfg.outer_tol) {
                st.converged = true;
                break;
            }
        }
        lambda_prev = st.lambda;
    }
    return st;
}

/// Indices of the m largest entries, descending; ties broken by ascending index.
inline std::vector<Index> rank_features(const Vector& z, int m) {
    const Index d = z.size();
    if (m < 1) throw InputError("rank_features: m must be >= 1");
    if (m > d)
        throw InputError("rank_features: m=" + std::to_string(m) + " exceeds feature count " +
                         std::to_string(d));
    std::vector<Index> idx(static_cast<std::size_t>(d));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::stable_sort(idx.begin(), idx.end(), [&z](Index a, Index b) { return z[a] > z[b]; });
    idx.resize(static_cast<std::size_t>(m));
    return idx;
}

}  // namespace nidf
