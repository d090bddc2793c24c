#pragma once

#include "nidf/types.hpp"

#include <algorithm>
#include <optional>

namespace nidf {

/// k-NN structure plus the heat-kernel affinity S, degrees D and graph
/// Laplacian L = D - S shared by the baseline selectors.
struct NeighborGraph {
    int k = 0;
    IndexMatrix neighbor_indices;  // n x k
    Matrix affinity;               // symmetric, zero diagonal, entries in [0,1]
    Vector degrees;
    Matrix laplacian;
};

/// Brute-force k nearest neighbors by squared Euclidean distance, excluding
/// self. Ties broken by ascending index. Rows of `points` are the points.
inline IndexMatrix knn(const Matrix& points, int k) {
    const Index n = points.rows();
    if (k < 0) throw InputError("knn: k must be nonnegative");
    if (k >= n) throw InputError("knn: k=" + std::to_string(k) + " requires at least k+1 points, got " +
                                 std::to_string(n));
    IndexMatrix neighbors(n, k);
    if (k == 0) return neighbors;

    const Vector sq_norms = points.rowwise().squaredNorm();
    std::vector<std::pair<double, Index>> cand(static_cast<std::size_t>(n - 1));
    Vector dots(n);
    for (Index i = 0; i < n; ++i) {
        dots.noalias() = points * points.row(i).transpose();
        std::size_t m = 0;
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            // max(0,.) guards tiny negative values from cancellation
            const double d2 = std::max(0.0, sq_norms[i] + sq_norms[j] - 2.0 * dots[j]);
            cand[m++] = {d2, j};
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        for (int a = 0; a < k; ++a) neighbors(i, a) = cand[static_cast<std::size_t>(a)].second;
    }
    return neighbors;
}

/// Heat-kernel affinity over the symmetrized (OR rule) k-NN edge set:
/// S_ij = exp(-|x_i - x_j|^2 / (2 t^2)) when j in N(i) or i in N(j), else 0.
/// bandwidth nullopt = auto: t is the mean distance over all (i, j in N(i)) pairs.
inline Matrix heat_affinity(const Matrix& points, const IndexMatrix& neighbors,
                            std::optional<double> bandwidth = std::nullopt) {
    const Index n = points.rows();
    if (neighbors.rows() != n) throw InputError("heat_affinity: neighbors/points mismatch");
    if (bandwidth && *bandwidth <= 0.0) throw InputError("heat_affinity: bandwidth must be positive");

    double t;
    if (bandwidth) {
        t = *bandwidth;
    } else {
        double sum = 0.0;
        Index count = 0;
        for (Index i = 0; i < n; ++i)
            for (Index a = 0; a < neighbors.cols(); ++a) {
                sum += (points.row(i) - points.row(neighbors(i, a))).norm();
                ++count;
            }
        t = count > 0 ? sum / static_cast<double>(count) : 0.0;
        // All neighbor distances zero: every edge weight is exp(0) regardless of t.
        if (t <= 0.0) t = 1.0;
    }

    Matrix S = Matrix::Zero(n, n);
    const double denom = 2.0 * t * t;
    for (Index i = 0; i < n; ++i) {
        for (Index a = 0; a < neighbors.cols(); ++a) {
            const Index j = neighbors(i, a);
            const double w = std::exp(-(points.row(i) - points.row(j)).squaredNorm() / denom);
            S(i, j) = w;
            S(j, i) = w;
        }
    }
    S.diagonal().setZero();
    return S;
}

/// Degrees and unnormalized Laplacian L = diag(D) - S.
inline std::pair<Vector, Matrix> laplacian(const Matrix& S) {
    if (S.rows() != S.cols()) throw InputError("laplacian: affinity must be square");
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw InputError("laplacian: affinity is not symmetric");
    Vector D = S.rowwise().sum();
    Matrix L = -S;
    L.diagonal() += D;
    return {std::move(D), std::move(L)};
}

inline NeighborGraph build_graph(const Matrix& points, int k,
                                 std::optional<double> bandwidth = std::nullopt) {
    NeighborGraph g;
    g.k = k;
    g.neighbor_indices = knn(points, k);
    g.affinity = heat_affinity(points, g.neighbor_indices, bandwidth);
    auto [D, L] = laplacian(g.affinity);
    g.degrees = std::move(D);
    g.laplacian = std::move(L);
    return g;
}

}  // namespace nidf
