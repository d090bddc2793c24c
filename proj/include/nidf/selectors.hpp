#pragma once

#include "nidf/interval.hpp"
#include "nidf/neighborhood.hpp"
#include "nidf/types.hpp"

#include <limits>

namespace nidf {

enum class SelectorKind { LapScore, Mcfs, Variance };
enum class Orientation { LowerBetter, HigherBetter };

inline SelectorKind parse_selector(const std::string& s) {
    if (s == "lapscore") return SelectorKind::LapScore;
    if (s == "mcfs") return SelectorKind::Mcfs;
    if (s == "variance") return SelectorKind::Variance;
    throw InputError("unknown selector '" + s + "' (expected lapscore|mcfs|variance)");
}

inline const char* selector_name(SelectorKind k) {
    switch (k) {
        case SelectorKind::LapScore: return "lapscore";
        case SelectorKind::Mcfs: return "mcfs";
        case SelectorKind::Variance: return "variance";
    }
    return "?";
}

// Raw-score orientation registry: lapscore rewards small Rayleigh quotients,
// the others reward large values.
inline Orientation selector_orientation(SelectorKind k) {
    return k == SelectorKind::LapScore ? Orientation::LowerBetter : Orientation::HigherBetter;
}

/// Normalized per-feature importance on one view; higher = more important.
struct FeatureScore {
    Vector values;
    SelectorKind selector = SelectorKind::LapScore;
    std::string view_tag = "original";
    bool normalized = false;
};

/// Shared knobs for the baseline selectors.
struct SelectorConfig {
    int graph_k = 5;                   // k-NN graph for lapscore/mcfs
    std::optional<double> bandwidth;   // nullopt = mean k-NN distance
    int n_embed = 0;                   // 0 = auto: class count if labeled, else 5
    double gamma = 0.1;
    double cd_tol = 1e-8;
    int cd_max_sweeps = 10000;

    void validate() const {
        if (graph_k < 1) throw InputError("graph k must be >= 1");
        if (bandwidth && *bandwidth <= 0.0) throw InputError("bandwidth must be positive");
        if (n_embed < 0) throw InputError("n_embed must be >= 1 (or 0 for auto)");
        if (!(gamma > 0.0)) throw InputError("gamma must be positive");
    }
};

/// Per-feature Rayleigh quotient on the neighborhood graph; lower = better.
/// Degenerate features (no variance against D) receive the worst finite score.
inline Vector laplacian_score(const Matrix& X, const NeighborGraph& g) {
    const Index n = X.rows(), d = X.cols();
    if (g.degrees.size() != n) throw InputError("laplacian_score: graph built on different n");
    const double total_degree = g.degrees.sum();
    if (total_degree <= 0.0) throw NumericError("laplacian_score: zero-degree graph");

    Vector raw(d);
    std::vector<Index> degenerate;
    double worst = -std::numeric_limits<double>::infinity();
    for (Index r = 0; r < d; ++r) {
        const Vector f = X.col(r);
        const double shift = f.dot(g.degrees) / total_degree;
        const Vector ft = f.array() - shift;
        const double denom = ft.cwiseAbs2().dot(g.degrees);
        if (denom < 1e-12) {
            degenerate.push_back(r);
            continue;
        }
        raw[r] = ft.dot(g.laplacian * ft) / denom;
        worst = std::max(worst, raw[r]);
    }
    if (static_cast<Index>(degenerate.size()) == d) worst = 0.0;
    for (Index r : degenerate) raw[r] = worst;
    return raw;
}

namespace detail {

// Lasso min_a |y - X a|^2 + gamma*|a|_1 by cyclic coordinate descent with
// soft thresholding. Stops when the largest coefficient change in a full
// sweep drops to tol.
inline Vector lasso_cd(const Matrix& X, const Vector& y, double gamma, double tol,
                       int max_sweeps) {
    const Index d = X.cols();
    Vector col_sq = X.colwise().squaredNorm();
    Vector a = Vector::Zero(d);
    Vector r = y;  // residual y - X a
    const double thresh = gamma / 2.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (Index j = 0; j < d; ++j) {
            if (col_sq[j] <= 1e-12) continue;
            const double rho = X.col(j).dot(r) + col_sq[j] * a[j];
            double next = 0.0;
            if (rho > thresh)
                next = (rho - thresh) / col_sq[j];
            else if (rho < -thresh)
                next = (rho + thresh) / col_sq[j];
            const double delta = a[j] - next;
            if (delta != 0.0) {
                r += X.col(j) * delta;
                a[j] = next;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        if (max_delta <= tol) break;
    }
    return a;
}

}  // namespace detail

/// Spectral embedding + L1 regression: the n_embed smallest nontrivial
/// generalized eigenvectors of L y = lambda D y are each regressed onto the
/// features with a lasso; score_r = max_k |a_{k,r}|. Higher = better.
inline Vector mcfs_score(const Matrix& X, const NeighborGraph& g, int n_embed, double gamma,
                         double cd_tol = 1e-8, int cd_max_sweeps = 10000) {
    const Index n = X.rows();
    if (n_embed < 1) throw InputError("mcfs: n_embed must be >= 1");
    if (n_embed > n - 1)
        throw InputError("mcfs: n_embed=" + std::to_string(n_embed) + " exceeds n-1");
    if (g.degrees.minCoeff() <= 0.0)
        throw NumericError("mcfs: graph has an isolated vertex (zero degree)");

    // L y = lambda D y with diagonal D: solve the symmetric problem
    // D^{-1/2} L D^{-1/2} u = lambda u, then map back y = D^{-1/2} u.
    const Vector d_inv_sqrt = g.degrees.cwiseSqrt().cwiseInverse();
    Matrix M = d_inv_sqrt.asDiagonal() * g.laplacian * d_inv_sqrt.asDiagonal();
    M = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
    if (eig.info() != Eigen::Success)
        throw NumericError("mcfs: eigendecomposition failed (n=" + std::to_string(n) + ")");

    Vector raw = Vector::Zero(X.cols());
    for (int k = 1; k <= n_embed; ++k) {  // column 0 is the trivial eigenvector
        const Vector y = d_inv_sqrt.cwiseProduct(eig.eigenvectors().col(k));
        const Vector a = detail::lasso_cd(X, y, gamma, cd_tol, cd_max_sweeps);
        raw = raw.cwiseMax(a.cwiseAbs());
    }
    return raw;
}

/// Population variance per feature column; higher = better.
inline Vector variance_score(const Matrix& X) {
    const double n = static_cast<double>(X.rows());
    Vector raw(X.cols());
    for (Index j = 0; j < X.cols(); ++j) {
        const double mean = X.col(j).mean();
        raw[j] = (X.col(j).array() - mean).square().sum() / n;
    }
    return raw;
}

/// Map raw selector output to a common higher-is-better [0,1] scale.
/// Constant raw vectors map to all-0.5.
inline Vector to_importance(const Vector& raw, Orientation orientation) {
    if (!raw.allFinite()) throw InputError("to_importance: raw scores must be finite");
    Vector v = orientation == Orientation::LowerBetter ? Vector(-raw) : raw;
    const double lo = v.minCoeff(), hi = v.maxCoeff();
    if (hi == lo) return Vector::Constant(raw.size(), 0.5);
    return (v.array() - lo) / (hi - lo);
}

inline Vector run_selector_raw(const Matrix& X, SelectorKind kind, const SelectorConfig& cfg,
                               int n_classes_hint = 0) {
    switch (kind) {
        case SelectorKind::LapScore: {
            const NeighborGraph g = build_graph(X, cfg.graph_k, cfg.bandwidth);
            return laplacian_score(X, g);
        }
        case SelectorKind::Mcfs: {
            const NeighborGraph g = build_graph(X, cfg.graph_k, cfg.bandwidth);
            int n_embed = cfg.n_embed;
            if (n_embed == 0) n_embed = n_classes_hint > 1 ? n_classes_hint : 5;
            n_embed = std::min<int>(n_embed, static_cast<int>(X.rows()) - 1);
            return mcfs_score(X, g, n_embed, cfg.gamma, cfg.cd_tol, cfg.cd_max_sweeps);
        }
        case SelectorKind::Variance: return variance_score(X);
    }
    throw InputError("invalid selector");
}

/// Run one selector on a single dataset and normalize to importance.
inline FeatureScore score_matrix(const DataMatrix& X, SelectorKind kind, const SelectorConfig& cfg,
                                 const std::string& view_tag = "original") {
    FeatureScore s;
    s.selector = kind;
    s.view_tag = view_tag;
    const int hint = X.has_labels() ? X.n_classes() : 0;
    s.values = to_importance(run_selector_raw(X.values, kind, cfg, hint), selector_orientation(kind));
    s.normalized = true;
    return s;
}

/// Run the chosen selector independently on each of the four views; each view
/// gets its own graph. Output order matches the view order.
inline std::array<FeatureScore, 4> score_views(const IntervalViews& views, SelectorKind kind,
                                               const SelectorConfig& cfg) {
    std::array<FeatureScore, 4> out;
    for (std::size_t i = 0; i < 4; ++i) {
        const char* tag = view_tag_name(kViewOrder[i]);
        try {
            out[i] = score_matrix(views.views[i], kind, cfg, tag);
        } catch (const NumericError& e) {
            throw NumericError(std::string("view ") + tag + ": " + e.what());
        } catch (const InputError& e) {
            throw InputError(std::string("view ") + tag + ": " + e.what());
        }
    }
    return out;
}

}  // namespace nidf
