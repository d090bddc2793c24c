#pragma once

#include "nidf/types.hpp"

#include <limits>

namespace nidf {

/// Pairwise feature-redundancy matrix for one view. Entries are |Pearson|
/// in [0,1] before repair; after psd_repair the matrix is PSD so the fusion
/// QPs stay convex.
struct RedundancyMatrix {
    Matrix values;  // d x d symmetric
    std::string view_tag;
    bool psd_repaired = false;
    double min_eig_before = std::numeric_limits<double>::quiet_NaN();
};

/// A_pq = |pearson(f_p, f_q)|; constant columns correlate with nothing
/// (off-diagonal 0) and A_pp = 1.
inline RedundancyMatrix abs_correlation(const DataMatrix& X, const std::string& view_tag = "") {
    X.validate();
    const Index n = X.n_samples(), d = X.n_features();

    Matrix centered(n, d);
    Vector norms(d);
    std::vector<bool> constant(static_cast<std::size_t>(d));
    for (Index j = 0; j < d; ++j) {
        centered.col(j) = X.values.col(j).array() - X.values.col(j).mean();
        norms[j] = centered.col(j).norm();
        const double magnitude = X.values.col(j).cwiseAbs().maxCoeff();
        constant[static_cast<std::size_t>(j)] =
            centered.col(j).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + magnitude);
    }

    RedundancyMatrix A;
    A.view_tag = view_tag;
    A.values = Matrix::Zero(d, d);
    for (Index p = 0; p < d; ++p) {
        A.values(p, p) = 1.0;
        if (constant[static_cast<std::size_t>(p)]) continue;
        for (Index q = p + 1; q < d; ++q) {
            if (constant[static_cast<std::size_t>(q)]) continue;
            const double c = std::abs(centered.col(p).dot(centered.col(q))) / (norms[p] * norms[q]);
            A.values(p, q) = A.values(q, p) = std::min(c, 1.0);
        }
    }
    return A;
}

/// Clip negative eigenvalues to zero, reconstruct, and add eps on the
/// diagonal. |corr| matrices need not be PSD; the fusion QPs do.
inline RedundancyMatrix psd_repair(const RedundancyMatrix& A, double eps = 1e-8) {
    if (A.values.rows() != A.values.cols()) throw InputError("psd_repair: matrix must be square");
    if (eps < 0.0) throw InputError("psd_repair: eps must be nonnegative");

    Matrix sym = 0.5 * (A.values + A.values.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    if (eig.info() != Eigen::Success)
        throw NumericError("psd_repair: eigendecomposition failed (d=" +
                           std::to_string(A.values.rows()) + ")");

    RedundancyMatrix out;
    out.view_tag = A.view_tag;
    out.min_eig_before = eig.eigenvalues().minCoeff();
    const Vector clipped = eig.eigenvalues().cwiseMax(0.0);
    Matrix repaired = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    repaired = 0.5 * (repaired + repaired.transpose());
    repaired.diagonal().array() += eps;
    out.values = std::move(repaired);
    out.psd_repaired = true;
    return out;
}

}  // namespace nidf
