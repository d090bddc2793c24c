#pragma once

#include "nidf/neighborhood.hpp"
#include "nidf/types.hpp"

#include <array>

namespace nidf {

enum class ScaleRule { SigmaOverAlpha, AlphaSigma };

inline ScaleRule parse_scale_rule(const std::string& s) {
    if (s == "sigma_over_alpha") return ScaleRule::SigmaOverAlpha;
    if (s == "alpha_sigma") return ScaleRule::AlphaSigma;
    throw InputError("unknown scale_rule '" + s + "' (expected sigma_over_alpha|alpha_sigma)");
}

/// Controls the neighborhood-interval construction.
struct IntervalConfig {
    int k = 15;
    double alpha = 3.0;
    ScaleRule scale_rule = ScaleRule::SigmaOverAlpha;
    bool include_self = true;

    double scale() const {
        return scale_rule == ScaleRule::SigmaOverAlpha ? 1.0 / alpha : alpha;
    }

    void validate() const {
        if (k < 1) throw InputError("interval k must be >= 1");
        if (!(alpha > 0.0)) throw InputError("interval alpha must be positive");
    }
};

enum class ViewTag { SampleLow, SampleUp, FeatureLow, FeatureUp };

inline const char* view_tag_name(ViewTag t) {
    switch (t) {
        case ViewTag::SampleLow: return "sample_low";
        case ViewTag::SampleUp: return "sample_up";
        case ViewTag::FeatureLow: return "feature_low";
        case ViewTag::FeatureUp: return "feature_up";
    }
    return "?";
}

constexpr std::array<ViewTag, 4> kViewOrder = {ViewTag::SampleLow, ViewTag::SampleUp,
                                               ViewTag::FeatureLow, ViewTag::FeatureUp};

/// The four interval-approximation datasets derived from one source matrix,
/// in fixed order (SampleLow, SampleUp, FeatureLow, FeatureUp).
struct IntervalViews {
    std::array<DataMatrix, 4> views;

    const DataMatrix& operator[](ViewTag t) const {
        return views[static_cast<std::size_t>(t)];
    }
};

namespace detail {

// Per-row neighborhood mean/stddev bands: row i is replaced by
// mu_i -+ c*sigma_i over N(i) = ({i} if include_self) + knn(i, k).
inline std::pair<Matrix, Matrix> interval_over_rows(const Matrix& X, const IntervalConfig& cfg) {
    const Index n = X.rows();
    if (cfg.k >= n)
        throw InputError("interval: k=" + std::to_string(cfg.k) + " requires at least k+1 points, got " +
                         std::to_string(n));
    if (cfg.k == 0 && !cfg.include_self)
        throw InputError("interval: empty neighborhood (k=0 and include_self=false)");

    const IndexMatrix neighbors = knn(X, cfg.k);
    const double c = cfg.scale();
    const double m = static_cast<double>(cfg.k + (cfg.include_self ? 1 : 0));

    Matrix low(n, X.cols()), up(n, X.cols());
    Eigen::RowVectorXd mu(X.cols()), var(X.cols());
    for (Index i = 0; i < n; ++i) {
        mu.setZero();
        if (cfg.include_self) mu += X.row(i);
        for (Index a = 0; a < neighbors.cols(); ++a) mu += X.row(neighbors(i, a));
        mu /= m;

        var.setZero();
        if (cfg.include_self) var += (X.row(i) - mu).cwiseAbs2();
        for (Index a = 0; a < neighbors.cols(); ++a)
            var += (X.row(neighbors(i, a)) - mu).cwiseAbs2();
        var /= m;  // population variance: well-defined for |N| = 1

        const Eigen::RowVectorXd band = c * var.cwiseSqrt();
        low.row(i) = mu - band;
        up.row(i) = mu + band;
    }
    return {std::move(low), std::move(up)};
}

}  // namespace detail

/// Sample-level bands: neighborhoods among rows of X.
inline std::pair<Matrix, Matrix> sample_interval(const Matrix& X, const IntervalConfig& cfg) {
    return detail::interval_over_rows(X, cfg);
}

/// Feature-level bands: neighborhoods among columns of X (points in R^n),
/// results shaped back to n x d.
inline std::pair<Matrix, Matrix> feature_interval(const Matrix& X, const IntervalConfig& cfg) {
    const Index d = X.cols();
    if (cfg.k >= d)
        throw InputError("interval: k=" + std::to_string(cfg.k) +
                         " requires at least k+1 features, got " + std::to_string(d));
    if (cfg.k == 0 && !cfg.include_self)
        throw InputError("interval: empty neighborhood (k=0 and include_self=false)");

    const IndexMatrix neighbors = knn(X.transpose(), cfg.k);
    const double c = cfg.scale();
    const double m = static_cast<double>(cfg.k + (cfg.include_self ? 1 : 0));

    Matrix low(X.rows(), d), up(X.rows(), d);
    Vector mu(X.rows()), var(X.rows());
    for (Index q = 0; q < d; ++q) {
        mu.setZero();
        if (cfg.include_self) mu += X.col(q);
        for (Index a = 0; a < neighbors.cols(); ++a) mu += X.col(neighbors(q, a));
        mu /= m;

        var.setZero();
        if (cfg.include_self) var += (X.col(q) - mu).cwiseAbs2();
        for (Index a = 0; a < neighbors.cols(); ++a) var += (X.col(neighbors(q, a)) - mu).cwiseAbs2();
        var /= m;

        const Vector band = c * var.cwiseSqrt();
        low.col(q) = mu - band;
        up.col(q) = mu + band;
    }
    return {std::move(low), std::move(up)};
}

/// Expand X into its four interval-approximation views. Labels and feature
/// ids are copied to every view unchanged.
inline IntervalViews build_views(const DataMatrix& X, const IntervalConfig& cfg) {
    X.validate();
    auto [slow, sup] = sample_interval(X.values, cfg);
    auto [flow, fup] = feature_interval(X.values, cfg);

    IntervalViews out;
    auto wrap = [&X](Matrix m) {
        DataMatrix v;
        v.values = std::move(m);
        v.labels = X.labels;
        v.feature_ids = X.feature_ids;
        return v;
    };
    out.views[0] = wrap(std::move(slow));
    out.views[1] = wrap(std::move(sup));
    out.views[2] = wrap(std::move(flow));
    out.views[3] = wrap(std::move(fup));
    return out;
}

}  // namespace nidf
