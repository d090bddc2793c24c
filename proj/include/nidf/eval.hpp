#pragma once

#include "nidf/fusion.hpp"
#include "nidf/kmeans.hpp"
#include "nidf/metrics.hpp"
#include "nidf/types.hpp"

#include <chrono>

namespace nidf {

struct PerM {
    int m = 0;
    double acc_mean = 0.0, acc_std = 0.0;
    double nmi_mean = 0.0, nmi_std = 0.0;
};

struct EvalReport {
    std::vector<PerM> per_m;
    double acc_avg = 0.0;
    double nmi_avg = 0.0;
    std::string method_id;
    std::string dataset_id;
    std::int64_t runtime_ms = 0;
};

/// Default feature-count sweep 10,20,...,100 clipped to <= d; degenerates to
/// {d} when no grid point fits.
inline std::vector<int> default_m_grid(Index d) {
    std::vector<int> grid;
    for (int m = 10; m <= 100; m += 10)
        if (m <= d) grid.push_back(m);
    if (grid.empty()) grid.push_back(static_cast<int>(d));
    return grid;
}

/// Cluster the top-m feature subsets over the m-grid, scoring every k-means
/// restart against the true labels. Restart r of grid cell m uses the child
/// seed (seed, m, r) so parallel and serial execution agree.
inline EvalReport evaluate_selection(const DataMatrix& X, const Vector& score,
                                     const std::vector<int>& m_grid, const KMeansConfig& kcfg,
                                     std::string method_id = "", std::string dataset_id = "") {
    if (!X.has_labels()) throw InputError("labels required for eval");
    if (score.size() != X.n_features()) throw InputError("eval: score length != feature count");
    if (m_grid.empty()) throw InputError("eval: empty m grid");
    for (int m : m_grid)
        if (m < 1 || m > X.n_features())
            throw InputError("eval: m=" + std::to_string(m) + " outside [1, d]");

    const auto t0 = std::chrono::steady_clock::now();
    const int k = kcfg.n_clusters > 0 ? kcfg.n_clusters : X.n_classes();
    if (k > X.n_samples()) throw InputError("eval: more clusters than samples");

    EvalReport report;
    report.method_id = std::move(method_id);
    report.dataset_id = std::move(dataset_id);

    const double R = static_cast<double>(kcfg.restarts);
    for (int m : m_grid) {
        const std::vector<Index> cols = rank_features(score, m);
        Matrix Xm(X.n_samples(), m);
        for (int j = 0; j < m; ++j) Xm.col(j) = X.values.col(cols[static_cast<std::size_t>(j)]);

        std::vector<double> accs, nmis;
        accs.reserve(static_cast<std::size_t>(kcfg.restarts));
        nmis.reserve(static_cast<std::size_t>(kcfg.restarts));
        for (int r = 0; r < kcfg.restarts; ++r) {
            std::mt19937_64 rng(child_seed(kcfg.seed, static_cast<std::uint64_t>(m),
                                           static_cast<std::uint64_t>(r)));
            const KMeansResult run = kmeans_single(Xm, k, kcfg.max_iter, rng);
            accs.push_back(acc(X.labels, run.labels));
            nmis.push_back(nmi(X.labels, run.labels));
        }

        auto mean_of = [R](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return s / R;
        };
        auto std_of = [R](const std::vector<double>& v, double mean) {
            double s = 0.0;
            for (double x : v) s += (x - mean) * (x - mean);
            return std::sqrt(s / R);
        };
        PerM cell;
        cell.m = m;
        cell.acc_mean = mean_of(accs);
        cell.acc_std = std_of(accs, cell.acc_mean);
        cell.nmi_mean = mean_of(nmis);
        cell.nmi_std = std_of(nmis, cell.nmi_mean);
        report.per_m.push_back(cell);
    }

    for (const PerM& cell : report.per_m) {
        report.acc_avg += cell.acc_mean;
        report.nmi_avg += cell.nmi_mean;
    }
    report.acc_avg /= static_cast<double>(report.per_m.size());
    report.nmi_avg /= static_cast<double>(report.per_m.size());
    report.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    return report;
}

}  // namespace nidf
