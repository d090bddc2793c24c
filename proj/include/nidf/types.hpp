#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace nidf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexMatrix = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>;

// Bad user input (files, shapes, parameter ranges). CLI maps this to exit 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical breakdown (solver failure, degenerate graph). CLI maps this to exit 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sample-by-feature dataset with optional integer class labels.
/// Immutable by convention once built; share freely across threads.
struct DataMatrix {
    Matrix values;                         // n x d
    std::vector<int> labels;               // empty = unlabeled, else length n, ids 0..c-1
    std::vector<std::string> feature_ids;  // empty = unnamed, else length d

    Index n_samples() const { return values.rows(); }
    Index n_features() const { return values.cols(); }
    bool has_labels() const { return !labels.empty(); }

    int n_classes() const {
        std::unordered_set<int> distinct(labels.begin(), labels.end());
        return static_cast<int>(distinct.size());
    }

    std::string feature_id(Index j) const {
        if (!feature_ids.empty()) return feature_ids[static_cast<std::size_t>(j)];
        return "f" + std::to_string(j);
    }

    void validate() const {
        if (n_samples() < 2) throw InputError("dataset needs at least 2 samples");
        if (n_features() < 1) throw InputError("dataset needs at least 1 feature");
        if (!values.allFinite()) throw InputError("dataset contains NaN or Inf values");
        if (!labels.empty() && static_cast<Index>(labels.size()) != n_samples())
            throw InputError("label vector length does not match sample count");
        if (!feature_ids.empty() && static_cast<Index>(feature_ids.size()) != n_features())
            throw InputError("feature_ids length does not match feature count");
    }
};

// splitmix64; used to derive independent child RNG seeds from a master seed
// so parallel and serial execution order give identical streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(master ^ splitmix64(a)) ^ splitmix64(~b));
}

}  // namespace nidf
