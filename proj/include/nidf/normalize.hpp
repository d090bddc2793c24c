#pragma once

#include "nidf/types.hpp"

namespace nidf {

enum class NormalizeMode { ZScore, MinMax, None };

inline NormalizeMode parse_normalize_mode(const std::string& s) {
    if (s == "zscore") return NormalizeMode::ZScore;
    if (s == "minmax") return NormalizeMode::MinMax;
    if (s == "none") return NormalizeMode::None;
    throw InputError("unknown normalize mode '" + s + "' (expected zscore|minmax|none)");
}

namespace detail {
// A column counts as constant when its spread is at float noise level
// relative to its magnitude.
inline bool column_is_constant(double spread, double magnitude) {
    return spread <= 1e-12 * (1.0 + magnitude);
}
}  // namespace detail

/// Per-feature standardization: mean 0, population stddev 1.
/// Constant columns map to all-zeros so index alignment is preserved.
inline DataMatrix zscore_normalize(const DataMatrix& X) {
    X.validate();
    const Index n = X.n_samples();
    DataMatrix out = X;
    for (Index j = 0; j < X.n_features(); ++j) {
        const double mean = X.values.col(j).mean();
        Vector centered = X.values.col(j).array() - mean;
        const double sigma = std::sqrt(centered.squaredNorm() / static_cast<double>(n));
        const double magnitude = X.values.col(j).cwiseAbs().maxCoeff();
        if (detail::column_is_constant(sigma, magnitude)) {
            out.values.col(j).setZero();
        } else {
            out.values.col(j) = centered / sigma;
        }
    }
    return out;
}

/// Per-feature rescale to [0,1]; constant columns map to all-zeros.
inline DataMatrix minmax_normalize(const DataMatrix& X) {
    X.validate();
    DataMatrix out = X;
    for (Index j = 0; j < X.n_features(); ++j) {
        const double lo = X.values.col(j).minCoeff();
        const double hi = X.values.col(j).maxCoeff();
        const double magnitude = std::max(std::abs(lo), std::abs(hi));
        if (detail::column_is_constant(hi - lo, magnitude)) {
            out.values.col(j).setZero();
        } else {
            out.values.col(j) = (X.values.col(j).array() - lo) / (hi - lo);
        }
    }
    return out;
}

inline DataMatrix normalize(const DataMatrix& X, NormalizeMode mode) {
    switch (mode) {
        case NormalizeMode::ZScore: return zscore_normalize(X);
        case NormalizeMode::MinMax: return minmax_normalize(X);
        case NormalizeMode::None: {
            X.validate();
            return X;
        }
    }
    throw InputError("invalid normalize mode");
}

}  // namespace nidf
