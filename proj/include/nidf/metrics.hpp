#pragma once

#include "nidf/types.hpp"

#include <unordered_map>

namespace nidf {

namespace detail {

inline std::vector<int> compact_labels(const std::vector<int>& labels, int& n_classes) {
    std::unordered_map<int, int> remap;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = remap.emplace(labels[i], static_cast<int>(remap.size()));
        out[i] = it->second;
    }
    n_classes = static_cast<int>(remap.size());
    return out;
}

// O(K^3) Hungarian algorithm (potentials formulation) for a square
// min-cost assignment. Returns assignment row -> column.
inline std::vector<int> hungarian_min_cost(const std::vector<std::vector<long long>>& cost) {
    const int K = static_cast<int>(cost.size());
    const long long INF = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(K + 1, 0), v(K + 1, 0), minv(K + 1);
    std::vector<int> p(K + 1, 0), way(K + 1, 0);
    for (int i = 1; i <= K; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), INF);
        std::vector<bool> used(K + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            long long delta = INF;
            int j1 = 0;
            for (int j = 1; j <= K; ++j) {
                if (used[j]) continue;
                const long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= K; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(K, -1);
    for (int j = 1; j <= K; ++j)
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

inline std::vector<std::vector<long long>> contingency(const std::vector<int>& a, int ca,
                                                       const std::vector<int>& b, int cb) {
    std::vector<std::vector<long long>> table(static_cast<std::size_t>(ca),
                                              std::vector<long long>(static_cast<std::size_t>(cb), 0));
    for (std::size_t i = 0; i < a.size(); ++i)
        ++table[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])];
    return table;
}

}  // namespace detail

/// Clustering accuracy: the best one-to-one cluster-to-class mapping
/// (Hungarian assignment on the contingency matrix), matched fraction in [0,1].
inline double acc(const std::vector<int>& true_labels, const std::vector<int>& pred_labels) {
    if (true_labels.size() != pred_labels.size()) throw InputError("acc: label length mismatch");
    if (true_labels.empty()) throw InputError("acc: empty labels");
    int c_true = 0, c_pred = 0;
    const std::vector<int> t = detail::compact_labels(true_labels, c_true);
    const std::vector<int> p = detail::compact_labels(pred_labels, c_pred);

    const int K = std::max(c_true, c_pred);
    const auto table = detail::contingency(p, c_pred, t, c_true);  // clusters x classes
    std::vector<std::vector<long long>> cost(static_cast<std::size_t>(K),
                                             std::vector<long long>(static_cast<std::size_t>(K), 0));
    for (int i = 0; i < c_pred; ++i)
        for (int j = 0; j < c_true; ++j)
            cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                -table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

    const std::vector<int> assign = detail::hungarian_min_cost(cost);
    long long matches = 0;
    for (int i = 0; i < c_pred; ++i)
        if (assign[static_cast<std::size_t>(i)] < c_true)
            matches += table[static_cast<std::size_t>(i)][static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    return static_cast<double>(matches) / static_cast<double>(true_labels.size());
}

/// Normalized mutual information MI(C,C') / max(H(C), H(C')), natural log,
/// clamped to [0,1]. Two trivial single-cluster partitions count as identical.
inline double nmi(const std::vector<int>& true_labels, const std::vector<int>& pred_labels) {
    if (true_labels.size() != pred_labels.size()) throw InputError("nmi: label length mismatch");
    if (true_labels.empty()) throw InputError("nmi: empty labels");
    int ca = 0, cb = 0;
    const std::vector<int> a = detail::compact_labels(true_labels, ca);
    const std::vector<int> b = detail::compact_labels(pred_labels, cb);
    const double n = static_cast<double>(a.size());

    const auto joint = detail::contingency(a, ca, b, cb);
    std::vector<double> pa(static_cast<std::size_t>(ca), 0.0), pb(static_cast<std::size_t>(cb), 0.0);
    for (int i = 0; i < ca; ++i)
        for (int j = 0; j < cb; ++j) {
            const double pij = static_cast<double>(joint[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) / n;
            pa[static_cast<std::size_t>(i)] += pij;
            pb[static_cast<std::size_t>(j)] += pij;
        }

    auto entropy = [](const std::vector<double>& p) {
        double h = 0.0;
        for (double x : p)
            if (x > 0.0) h -= x * std::log(x);
        return h;
    };
    const double ha = entropy(pa), hb = entropy(pb);
    if (std::max(ha, hb) == 0.0) return 1.0;  // both single-cluster: identical partitions

    double mi = 0.0;
    for (int i = 0; i < ca; ++i)
        for (int j = 0; j < cb; ++j) {
            const double pij = static_cast<double>(joint[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) / n;
            if (pij > 0.0)
                mi += pij * std::log(pij / (pa[static_cast<std::size_t>(i)] * pb[static_cast<std::size_t>(j)]));
        }
    return std::clamp(mi / std::max(ha, hb), 0.0, 1.0);
}

}  // namespace nidf
