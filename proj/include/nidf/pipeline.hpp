#pragma once

#include "nidf/csv.hpp"
#include "nidf/eval.hpp"
#include "nidf/fusion.hpp"
#include "nidf/interval.hpp"
#include "nidf/normalize.hpp"
#include "nidf/redundancy.hpp"
#include "nidf/selectors.hpp"
#include "nidf/types.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

namespace nidf {

enum class EvalMode { Auto, On, Off };

inline EvalMode parse_eval_mode(const std::string& s) {
    if (s == "auto") return EvalMode::Auto;
    if (s == "on") return EvalMode::On;
    if (s == "off") return EvalMode::Off;
    throw InputError("unknown eval mode '" + s + "' (expected auto|on|off)");
}

/// Full experiment configuration. Defaults follow the reference protocol:
/// interval k=15, alpha=3, 20 k-means restarts, m-grid 10:10:100.
struct RunConfig {
    NormalizeMode normalize_mode = NormalizeMode::ZScore;
    IntervalConfig interval;
    SelectorKind selector = SelectorKind::LapScore;
    SelectorConfig selector_cfg;
    FusionConfig fusion;
    KMeansConfig kmeans;  // n_clusters 0 = derive from labels
    std::vector<int> m_grid;  // empty = default grid clipped to d
    EvalMode eval_mode = EvalMode::Auto;
    int top_m = 0;  // 0 = max of the effective m grid
    std::uint64_t seed = 0;
    bool timing = false;  // off keeps reports byte-reproducible
    bool dump_redundancy = false;
    int jobs = 1;
    std::string out_dir = ".";

    void validate() const {
        interval.validate();
        selector_cfg.validate();
        fusion.validate();
        if (kmeans.restarts < 1 || kmeans.max_iter < 1) throw InputError("bad kmeans config");
        if (top_m < 0) throw InputError("top_m must be >= 0");
        if (jobs < 1) throw InputError("jobs must be >= 1");
        for (int m : m_grid)
            if (m < 1) throw InputError("m grid entries must be >= 1");
    }
};

// ---------------------------------------------------------------------------
// Config file: flat key=value lines, '#' comments, flags override.
// ---------------------------------------------------------------------------

inline std::vector<int> parse_m_grid(const std::string& spec) {
    std::vector<int> grid;
    if (spec.find(':') != std::string::npos) {
        // start:step:stop
        int start, step, stop;
        char c1, c2;
        std::istringstream ss(spec);
        if (!(ss >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' || step <= 0)
            throw InputError("bad m_grid range '" + spec + "' (expected start:step:stop)");
        for (int m = start; m <= stop; m += step) grid.push_back(m);
    } else {
        std::istringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = detail::trim(tok);
            if (tok.empty()) continue;
            grid.push_back(std::stoi(tok));
        }
    }
    if (grid.empty()) throw InputError("empty m_grid '" + spec + "'");
    return grid;
}

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InputError("bad boolean for " + key + ": '" + v + "'");
}

inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "normalize") cfg.normalize_mode = parse_normalize_mode(value);
        else if (key == "selector") cfg.selector = parse_selector(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "timing") cfg.timing = parse_bool(value, key);
        else if (key == "dump_redundancy") cfg.dump_redundancy = parse_bool(value, key);
        else if (key == "jobs") cfg.jobs = std::stoi(value);
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "top_m") cfg.top_m = std::stoi(value);
        else if (key == "interval.k") cfg.interval.k = std::stoi(value);
        else if (key == "interval.alpha") cfg.interval.alpha = std::stod(value);
        else if (key == "interval.scale_rule") cfg.interval.scale_rule = parse_scale_rule(value);
        else if (key == "interval.include_self") cfg.interval.include_self = parse_bool(value, key);
        else if (key == "graph.k") cfg.selector_cfg.graph_k = std::stoi(value);
        else if (key == "graph.bandwidth")
            cfg.selector_cfg.bandwidth =
                value == "auto" ? std::nullopt : std::optional<double>(std::stod(value));
        else if (key == "mcfs.n_embed") cfg.selector_cfg.n_embed = value == "auto" ? 0 : std::stoi(value);
        else if (key == "mcfs.gamma") cfg.selector_cfg.gamma = std::stod(value);
        else if (key == "mcfs.cd_tol") cfg.selector_cfg.cd_tol = std::stod(value);
        else if (key == "mcfs.cd_max_sweeps") cfg.selector_cfg.cd_max_sweeps = std::stoi(value);
        else if (key == "fusion.outer_tol") cfg.fusion.outer_tol = std::stod(value);
        else if (key == "fusion.outer_max_iter") cfg.fusion.outer_max_iter = std::stoi(value);
        else if (key == "fusion.qp_tol") cfg.fusion.qp_tol = std::stod(value);
        else if (key == "fusion.qp_max_iter") cfg.fusion.qp_max_iter = std::stoi(value);
        else if (key == "fusion.lambda_floor") cfg.fusion.lambda_floor = std::stod(value);
        else if (key == "eval.restarts") cfg.kmeans.restarts = std::stoi(value);
        else if (key == "eval.max_iter") cfg.kmeans.max_iter = std::stoi(value);
        else if (key == "eval.n_clusters") cfg.kmeans.n_clusters = std::stoi(value);
        else if (key == "eval.m_grid") cfg.m_grid = parse_m_grid(value);
        else if (key == "eval.mode") cfg.eval_mode = parse_eval_mode(value);
        else throw InputError("unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
        throw InputError("bad value for " + key + ": '" + value + "'");
    } catch (const std::out_of_range&) {
        throw InputError("value out of range for " + key + ": '" + value + "'");
    }
}

}  // namespace detail

inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError(path + ":" + std::to_string(lineno) + ": expected key=value");
        detail::apply_config_entry(cfg, detail::trim(line.substr(0, eq)),
                                   detail::trim(line.substr(eq + 1)));
    }
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

struct PipelineResult {
    DataMatrix normalized;
    IntervalViews views;
    std::array<FeatureScore, 4> scores;
    std::vector<RedundancyMatrix> redundancy;
    FusionState fusion;
    std::vector<Index> selected;  // top-m feature indices
    std::optional<EvalReport> eval;
    std::string dataset_id;
    std::string method_id;
    std::int64_t runtime_ms = 0;
};

/// Algorithm steps 1-4 plus evaluation: views -> per-view scores -> per-view
/// redundancy -> alternating fusion -> ranking -> clustering eval.
inline PipelineResult run_pipeline(const DataMatrix& X, const RunConfig& cfg,
                                   std::string dataset_id = "dataset") {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    PipelineResult res;
    res.dataset_id = std::move(dataset_id);
    res.method_id = std::string(selector_name(cfg.selector)) + "_nidf";
    res.normalized = normalize(X, cfg.normalize_mode);
    res.views = build_views(res.normalized, cfg.interval);
    res.scores = score_views(res.views, cfg.selector, cfg.selector_cfg);

    std::vector<Matrix> A_list;
    std::vector<Vector> s_list;
    for (std::size_t i = 0; i < 4; ++i) {
        RedundancyMatrix A = abs_correlation(res.views.views[i], view_tag_name(kViewOrder[i]));
        res.redundancy.push_back(psd_repair(A));
        A_list.push_back(res.redundancy.back().values);
        s_list.push_back(res.scores[i].values);
    }

    res.fusion = run_nidf(A_list, s_list, cfg.fusion);

    std::vector<int> grid = cfg.m_grid.empty() ? default_m_grid(X.n_features()) : cfg.m_grid;
    for (int m : grid)
        if (m > X.n_features())
            throw InputError("m grid entry " + std::to_string(m) + " exceeds feature count " +
                             std::to_string(X.n_features()));
    const int top_m = cfg.top_m > 0 ? cfg.top_m : *std::max_element(grid.begin(), grid.end());
    res.selected = rank_features(res.fusion.z, std::min<int>(top_m, static_cast<int>(X.n_features())));

    const bool want_eval = cfg.eval_mode == EvalMode::On ||
                           (cfg.eval_mode == EvalMode::Auto && X.has_labels());
    if (want_eval) {
        KMeansConfig kcfg = cfg.kmeans;
        kcfg.seed = cfg.seed;
        res.eval = evaluate_selection(res.normalized, res.fusion.z, grid, kcfg, res.method_id,
                                      res.dataset_id);
    }
    res.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return res;
}

/// Baseline arm for comparisons: selector importance on the normalized
/// original matrix, no views, no fusion.
inline std::pair<FeatureScore, std::optional<EvalReport>> run_raw_selector(
    const DataMatrix& X, const RunConfig& cfg, const std::string& dataset_id = "dataset") {
    cfg.validate();
    const DataMatrix Xn = normalize(X, cfg.normalize_mode);
    FeatureScore score = score_matrix(Xn, cfg.selector, cfg.selector_cfg);

    std::optional<EvalReport> report;
    const bool want_eval = cfg.eval_mode == EvalMode::On ||
                           (cfg.eval_mode == EvalMode::Auto && X.has_labels());
    if (want_eval) {
        std::vector<int> grid = cfg.m_grid.empty() ? default_m_grid(X.n_features()) : cfg.m_grid;
        KMeansConfig kcfg = cfg.kmeans;
        kcfg.seed = cfg.seed;
        report = evaluate_selection(Xn, score.values, grid, kcfg, selector_name(cfg.selector),
                                    dataset_id);
    }
    return {std::move(score), std::move(report)};
}

// ---------------------------------------------------------------------------
// Artifact writers
// ---------------------------------------------------------------------------

inline nlohmann::json fusion_json(const FusionState& st) {
    nlohmann::json j;
    j["lambda"] = st.lambda;
    j["w"] = std::vector<double>(st.w.data(), st.w.data() + st.w.size());
    j["iterations"] = st.iterations;
    j["converged"] = st.converged;
    j["objective_history"] = st.objective_history;
    return j;
}

inline nlohmann::json eval_json(const EvalReport& report, const FusionState* fusion, bool timing) {
    nlohmann::json j;
    j["dataset"] = report.dataset_id;
    j["method"] = report.method_id;
    if (fusion) {
        j["lambda"] = fusion->lambda;
        j["w"] = std::vector<double>(fusion->w.data(), fusion->w.data() + fusion->w.size());
        j["converged"] = fusion->converged;
    } else {
        j["lambda"] = nullptr;
        j["w"] = nullptr;
        j["converged"] = true;
    }
    j["per_m"] = nlohmann::json::array();
    for (const PerM& c : report.per_m) {
        j["per_m"].push_back({{"m", c.m},
                              {"acc_mean", c.acc_mean},
                              {"acc_std", c.acc_std},
                              {"nmi_mean", c.nmi_mean},
                              {"nmi_std", c.nmi_std}});
    }
    j["acc_avg"] = report.acc_avg;
    j["nmi_avg"] = report.nmi_avg;
    j["runtime_ms"] = timing ? report.runtime_ms : 0;
    return j;
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw InputError("write failed: " + path);
}

inline std::string dataset_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

constexpr std::array<const char*, 4> kViewFileSuffix = {".slow.csv", ".sup.csv", ".flow.csv",
                                                        ".fup.csv"};

inline std::vector<std::string> write_views(const IntervalViews& views, const std::string& out_dir,
                                            const std::string& stem) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> paths;
    for (std::size_t i = 0; i < 4; ++i) {
        std::string p = (std::filesystem::path(out_dir) / (stem + kViewFileSuffix[i])).string();
        write_csv(views.views[i], p);
        paths.push_back(std::move(p));
    }
    return paths;
}

// ---------------------------------------------------------------------------
// Bench: (dataset x method) grid with raw and fused arms per selector
// ---------------------------------------------------------------------------

struct BenchCell {
    bool ok = false;
    double acc_avg = 0.0;
    double nmi_avg = 0.0;
    std::string error;
};

struct BenchTable {
    std::vector<std::string> datasets;                // row labels
    std::vector<std::string> methods;                 // column labels
    std::vector<std::vector<BenchCell>> cells;        // [dataset][method]

    /// One row per dataset plus AVERAGE; per method an ACC column block then
    /// an NMI column block. Failed cells print ERR and are excluded from means.
    std::string to_csv() const {
        std::ostringstream out;
        out << "dataset";
        for (const auto& m : methods) out << ',' << m << "_acc";
        for (const auto& m : methods) out << ',' << m << "_nmi";
        out << '\n';
        for (std::size_t r = 0; r < datasets.size(); ++r) {
            out << datasets[r];
            for (std::size_t c = 0; c < methods.size(); ++c)
                out << ',' << (cells[r][c].ok ? detail::format_double(cells[r][c].acc_avg) : "ERR");
            for (std::size_t c = 0; c < methods.size(); ++c)
                out << ',' << (cells[r][c].ok ? detail::format_double(cells[r][c].nmi_avg) : "ERR");
            out << '\n';
        }
        out << "AVERAGE";
        auto col_mean = [this](std::size_t c, bool use_acc) -> std::string {
            double sum = 0.0;
            int count = 0;
            for (std::size_t r = 0; r < datasets.size(); ++r) {
                if (!cells[r][c].ok) continue;
                sum += use_acc ? cells[r][c].acc_avg : cells[r][c].nmi_avg;
                ++count;
            }
            return count > 0 ? detail::format_double(sum / count) : std::string("ERR");
        };
        for (std::size_t c = 0; c < methods.size(); ++c) out << ',' << col_mean(c, true);
        for (std::size_t c = 0; c < methods.size(); ++c) out << ',' << col_mean(c, false);
        out << '\n';
        return out.str();
    }

    bool any_ok() const {
        for (const auto& row : cells)
            for (const auto& cell : row)
                if (cell.ok) return true;
        return false;
    }
};

/// Run every (dataset, selector, {raw, fused}) cell, up to `jobs` at a time.
/// Cells are independent deterministic pipelines; failures turn into ERR cells.
inline BenchTable run_bench(const std::vector<DataMatrix>& datasets,
                            const std::vector<std::string>& dataset_ids,
                            const std::vector<SelectorKind>& selectors, const RunConfig& base_cfg) {
    if (datasets.empty() || datasets.size() != dataset_ids.size())
        throw InputError("bench: need aligned datasets and ids");
    if (selectors.empty()) throw InputError("bench: need at least one selector");

    BenchTable table;
    table.datasets = dataset_ids;
    for (SelectorKind s : selectors) {
        table.methods.emplace_back(selector_name(s));
        table.methods.emplace_back(std::string(selector_name(s)) + "_nidf");
    }
    table.cells.assign(datasets.size(), std::vector<BenchCell>(table.methods.size()));

    struct Task {
        std::size_t row, col;
        SelectorKind selector;
        bool fused;
    };
    std::vector<Task> tasks;
    for (std::size_t r = 0; r < datasets.size(); ++r)
        for (std::size_t s = 0; s < selectors.size(); ++s) {
            tasks.push_back({r, 2 * s, selectors[s], false});
            tasks.push_back({r, 2 * s + 1, selectors[s], true});
        }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1)) {
            const Task& task = tasks[t];
            BenchCell& cell = table.cells[task.row][task.col];
            try {
                RunConfig cfg = base_cfg;
                cfg.selector = task.selector;
                cfg.eval_mode = EvalMode::On;
                const DataMatrix& X = datasets[task.row];
                std::optional<EvalReport> report;
                if (task.fused) {
                    report = run_pipeline(X, cfg, dataset_ids[task.row]).eval;
                } else {
                    report = run_raw_selector(X, cfg, dataset_ids[task.row]).second;
                }
                cell.acc_avg = report->acc_avg;
                cell.nmi_avg = report->nmi_avg;
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };

    const int n_threads = std::min<int>(base_cfg.jobs, static_cast<int>(tasks.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return table;
}

}  // namespace nidf
