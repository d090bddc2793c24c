#pragma once

#include "nidf/types.hpp"

#include <random>

namespace nidf {

struct KMeansConfig {
    int n_clusters = 0;
    int restarts = 20;
    int max_iter = 300;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_clusters < 1) throw InputError("kmeans: n_clusters must be >= 1");
        if (restarts < 1) throw InputError("kmeans: restarts must be >= 1");
        if (max_iter < 1) throw InputError("kmeans: max_iter must be >= 1");
    }
};

struct KMeansResult {
    std::vector<int> labels;
    double inertia = 0.0;
    int iterations = 0;
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// k-means++ seeding: first center uniform, the rest sampled proportionally to
// the squared distance to the nearest chosen center. When the remaining mass
// is zero (duplicates), the lowest unchosen index is taken.
inline std::vector<Index> kmeanspp_init(const Matrix& X, int k, std::mt19937_64& rng) {
    const Index n = X.rows();
    std::vector<Index> centers;
    centers.reserve(static_cast<std::size_t>(k));
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);

    Index first = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    centers.push_back(first);
    chosen[static_cast<std::size_t>(first)] = true;

    Vector min_d2 = (X.rowwise() - X.row(first)).rowwise().squaredNorm();
    while (static_cast<int>(centers.size()) < k) {
        const double total = min_d2.sum();
        Index next = -1;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double acc = 0.0;
            for (Index i = 0; i < n; ++i) {
                acc += min_d2[i];
                if (acc >= target && !chosen[static_cast<std::size_t>(i)]) {
                    next = i;
                    break;
                }
            }
        }
        if (next < 0) {
            for (Index i = 0; i < n; ++i)
                if (!chosen[static_cast<std::size_t>(i)]) {
                    next = i;
                    break;
                }
        }
        centers.push_back(next);
        chosen[static_cast<std::size_t>(next)] = true;
        min_d2 = min_d2.cwiseMin((X.rowwise() - X.row(next)).rowwise().squaredNorm());
    }
    return centers;
}

}  // namespace detail

/// One Lloyd run from a k-means++ initialization. Assignment ties go to the
/// lowest centroid index; empty clusters are re-seeded to the point farthest
/// from its assigned centroid.
inline KMeansResult kmeans_single(const Matrix& X, int k, int max_iter, std::mt19937_64& rng) {
    const Index n = X.rows();
    if (k < 1 || k > n) throw InputError("kmeans: n_clusters must be in [1, n]");

    const std::vector<Index> seeds = detail::kmeanspp_init(X, k, rng);
    Matrix centroids(k, X.cols());
    for (int c = 0; c < k; ++c) centroids.row(c) = X.row(seeds[static_cast<std::size_t>(c)]);

    KMeansResult res;
    res.labels.assign(static_cast<std::size_t>(n), 0);
    Vector assigned_d2(n);

    for (int iter = 1; iter <= max_iter; ++iter) {
        bool changed = false;
        for (Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d2 = (X.row(i) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d2 = (X.row(i) - centroids.row(c)).squaredNorm();
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = c;
                }
            }
            if (res.labels[static_cast<std::size_t>(i)] != best) {
                res.labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
            assigned_d2[i] = best_d2;
        }
        res.iterations = iter;

        centroids.setZero();
        std::vector<Index> counts(static_cast<std::size_t>(k), 0);
        for (Index i = 0; i < n; ++i) {
            centroids.row(res.labels[static_cast<std::size_t>(i)]) += X.row(i);
            ++counts[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
            } else {
                Index farthest;
                assigned_d2.maxCoeff(&farthest);
                centroids.row(c) = X.row(farthest);
                assigned_d2[farthest] = 0.0;
                changed = true;
            }
        }
        if (!changed && iter > 1) break;
    }

    res.inertia = 0.0;
    for (Index i = 0; i < n; ++i)
        res.inertia += (X.row(i) - centroids.row(res.labels[static_cast<std::size_t>(i)])).squaredNorm();
    return res;
}

/// Best-of-restarts k-means: independent seeded initializations, lowest
/// within-cluster sum of squares wins. Deterministic given cfg.seed.
inline KMeansResult kmeans(const Matrix& X, const KMeansConfig& cfg) {
    cfg.validate();
    if (cfg.n_clusters > X.rows()) throw InputError("kmeans: n_clusters exceeds sample count");
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.restarts; ++r) {
        std::mt19937_64 rng(child_seed(cfg.seed, 0x6b6d6e73ULL, static_cast<std::uint64_t>(r)));
        KMeansResult run = kmeans_single(X, cfg.n_clusters, cfg.max_iter, rng);
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return best;
}

}  // namespace nidf
