// nidf - neighborhood-interval disturbance fusion feature selection CLI.
//
// Subcommands: views, score, fuse, eval, pipeline, bench.
// Exit codes: 0 success, 2 input error, 3 numeric failure.

#include "nidf/nidf.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using nidf::DataMatrix;
using nidf::RunConfig;

namespace {

struct LoadFlags {
    std::string label_col;
    int label_index = -1;
    bool no_header = false;

    nidf::LabelColumn selector() const {
        if (!label_col.empty()) return nidf::LabelColumn::by_name(label_col);
        if (label_index >= 0) return nidf::LabelColumn::by_index(label_index);
        return nidf::LabelColumn::none();
    }
};

void add_load_flags(CLI::App* cmd, LoadFlags& lf) {
    cmd->add_option("--label-col", lf.label_col, "Label column name (requires header)");
    cmd->add_option("--label-index", lf.label_index, "Label column 0-based index");
    cmd->add_flag("--no-header", lf.no_header, "Treat the first line as data");
}

DataMatrix load_dataset(const std::string& path, const LoadFlags& lf) {
    return nidf::load_csv(path, lf.selector(), !lf.no_header);
}

std::string out_path(const RunConfig& cfg, const std::string& stem, const std::string& suffix) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / (stem + suffix)).string();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = nidf::detail::trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

void write_selected_csv(const DataMatrix& X, const nidf::FusionState& st,
                        const std::vector<nidf::Index>& selected, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw nidf::InputError("cannot write file: " + path);
    out << "rank,feature_id,score\n";
    for (std::size_t r = 0; r < selected.size(); ++r)
        out << r << ',' << X.feature_id(selected[r]) << ','
            << nidf::detail::format_double(st.z[selected[r]]) << '\n';
}

std::vector<std::string> feature_id_list(const DataMatrix& X) {
    std::vector<std::string> ids;
    for (nidf::Index j = 0; j < X.n_features(); ++j) ids.push_back(X.feature_id(j));
    return ids;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"NIDF: interval-view fusion for unsupervised feature selection"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "key=value config file (flags win)");
    auto* opt_seed = app.add_option("--seed", cfg.seed, "Master RNG seed");
    std::string normalize_str, out_dir;
    auto* opt_norm = app.add_option("--normalize", normalize_str, "zscore|minmax|none");
    auto* opt_jobs = app.add_option("--jobs", cfg.jobs, "Max concurrent bench cells");
    auto* opt_outdir = app.add_option("--out-dir", out_dir, "Output directory");
    std::vector<std::string> set_entries;
    app.add_option("--set", set_entries, "Extra config entries as key=value")->take_all();

    std::string selector_str, scale_rule_str, m_grid_str, eval_mode_str, bandwidth_str;
    auto* opt_selector = app.add_option("--selector", selector_str, "lapscore|mcfs|variance");
    auto* opt_k = app.add_option("--interval-k", cfg.interval.k, "Interval neighborhood size");
    auto* opt_alpha = app.add_option("--alpha", cfg.interval.alpha, "Interval width parameter");
    auto* opt_scale = app.add_option("--scale-rule", scale_rule_str, "sigma_over_alpha|alpha_sigma");
    auto* opt_graph_k = app.add_option("--graph-k", cfg.selector_cfg.graph_k, "Selector graph k");
    auto* opt_bw = app.add_option("--bandwidth", bandwidth_str, "Heat kernel bandwidth or 'auto'");
    auto* opt_gamma = app.add_option("--gamma", cfg.selector_cfg.gamma, "MCFS lasso penalty");
    auto* opt_nembed = app.add_option("--n-embed", cfg.selector_cfg.n_embed,
                                      "MCFS embedding size (0 = auto)");
    auto* opt_mgrid = app.add_option("--m-grid", m_grid_str, "e.g. 10:10:100 or 5,10,20");
    auto* opt_restarts = app.add_option("--restarts", cfg.kmeans.restarts, "k-means restarts");
    auto* opt_clusters = app.add_option("--n-clusters", cfg.kmeans.n_clusters,
                                        "Cluster count (0 = from labels)");
    auto* opt_evalmode = app.add_option("--eval", eval_mode_str, "auto|on|off");
    auto* opt_topm = app.add_option("--top-m", cfg.top_m, "Selected-feature count (0 = grid max)");
    bool timing = false, dump_red = false;
    auto* opt_timing = app.add_flag("--timing", timing, "Record wall-clock runtime_ms in reports");
    auto* opt_dump = app.add_flag("--dump-redundancy", dump_red, "Dump per-view redundancy CSVs");

    // Global flags may appear after the subcommand name.
    app.fallthrough();

    // views
    auto* cmd_views = app.add_subcommand("views", "Write the four interval-approximation views");
    std::string views_data;
    LoadFlags views_lf;
    cmd_views->add_option("data", views_data, "Input CSV")->required();
    add_load_flags(cmd_views, views_lf);

    // score
    auto* cmd_score = app.add_subcommand("score", "Per-view selector scores");
    std::string score_data;
    LoadFlags score_lf;
    cmd_score->add_option("data", score_data, "Input CSV")->required();
    add_load_flags(cmd_score, score_lf);

    // fuse
    auto* cmd_fuse = app.add_subcommand("fuse", "Fuse per-view scores into the final ranking");
    std::string fuse_data, fuse_views_stem, fuse_scores_stem;
    LoadFlags fuse_lf;
    cmd_fuse->add_option("data", fuse_data, "Input CSV")->required();
    cmd_fuse->add_option("--views-stem", fuse_views_stem,
                         "Read <stem>.slow.csv etc. instead of recomputing views");
    cmd_fuse->add_option("--scores-stem", fuse_scores_stem,
                         "Read <stem>.score.<view>.csv instead of recomputing scores");
    add_load_flags(cmd_fuse, fuse_lf);

    // eval
    auto* cmd_eval = app.add_subcommand("eval", "Clustering evaluation of a score file");
    std::string eval_data, eval_score, eval_csv_row;
    LoadFlags eval_lf;
    cmd_eval->add_option("data", eval_data, "Input CSV (labels required)")->required();
    cmd_eval->add_option("--score", eval_score, "feature_id,score CSV to evaluate")->required();
    cmd_eval->add_option("--csv-row", eval_csv_row, "Also write a bench-style CSV row here");
    add_load_flags(cmd_eval, eval_lf);

    // pipeline
    auto* cmd_pipe = app.add_subcommand("pipeline", "Full run: views, scores, fusion, eval");
    std::string pipe_data;
    LoadFlags pipe_lf;
    cmd_pipe->add_option("data", pipe_data, "Input CSV")->required();
    add_load_flags(cmd_pipe, pipe_lf);

    // bench
    auto* cmd_bench = app.add_subcommand("bench", "Raw vs fused comparison table");
    std::vector<std::string> bench_data;
    std::string bench_selectors = "lapscore", bench_out;
    LoadFlags bench_lf;
    cmd_bench->add_option("data", bench_data, "Labeled input CSVs")->required()->expected(-1);
    cmd_bench->add_option("--selectors", bench_selectors, "Comma list of selectors");
    cmd_bench->add_option("--out", bench_out, "Table output path (default <out-dir>/bench.csv)");
    add_load_flags(cmd_bench, bench_lf);

    CLI11_PARSE(app, argc, argv);

    // Defaults, then config file, then flags.
    RunConfig flag_cfg = cfg;
    cfg = RunConfig{};
    if (!config_path.empty()) nidf::load_config_file(cfg, config_path);
    if (opt_seed->count()) cfg.seed = flag_cfg.seed;
    if (opt_norm->count()) cfg.normalize_mode = nidf::parse_normalize_mode(normalize_str);
    if (opt_jobs->count()) cfg.jobs = flag_cfg.jobs;
    if (opt_outdir->count()) cfg.out_dir = out_dir;
    if (opt_selector->count()) cfg.selector = nidf::parse_selector(selector_str);
    if (opt_k->count()) cfg.interval.k = flag_cfg.interval.k;
    if (opt_alpha->count()) cfg.interval.alpha = flag_cfg.interval.alpha;
    if (opt_scale->count()) cfg.interval.scale_rule = nidf::parse_scale_rule(scale_rule_str);
    if (opt_graph_k->count()) cfg.selector_cfg.graph_k = flag_cfg.selector_cfg.graph_k;
    if (opt_bw->count())
        cfg.selector_cfg.bandwidth = bandwidth_str == "auto"
                                         ? std::nullopt
                                         : std::optional<double>(std::stod(bandwidth_str));
    if (opt_gamma->count()) cfg.selector_cfg.gamma = flag_cfg.selector_cfg.gamma;
    if (opt_nembed->count()) cfg.selector_cfg.n_embed = flag_cfg.selector_cfg.n_embed;
    if (opt_mgrid->count()) cfg.m_grid = nidf::parse_m_grid(m_grid_str);
    if (opt_restarts->count()) cfg.kmeans.restarts = flag_cfg.kmeans.restarts;
    if (opt_clusters->count()) cfg.kmeans.n_clusters = flag_cfg.kmeans.n_clusters;
    if (opt_evalmode->count()) cfg.eval_mode = nidf::parse_eval_mode(eval_mode_str);
    if (opt_topm->count()) cfg.top_m = flag_cfg.top_m;
    if (opt_timing->count()) cfg.timing = timing;
    if (opt_dump->count()) cfg.dump_redundancy = dump_red;
    for (const std::string& entry : set_entries) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) throw nidf::InputError("--set expects key=value, got " + entry);
        nidf::detail::apply_config_entry(cfg, nidf::detail::trim(entry.substr(0, eq)),
                                         nidf::detail::trim(entry.substr(eq + 1)));
    }
    cfg.validate();

    if (cmd_views->parsed()) {
        const DataMatrix X = load_dataset(views_data, views_lf);
        const DataMatrix Xn = nidf::normalize(X, cfg.normalize_mode);
        const nidf::IntervalViews views = nidf::build_views(Xn, cfg.interval);
        for (const std::string& p :
             nidf::write_views(views, cfg.out_dir, nidf::dataset_stem(views_data)))
            std::cout << p << '\n';
        return 0;
    }

    if (cmd_score->parsed()) {
        const DataMatrix X = load_dataset(score_data, score_lf);
        const DataMatrix Xn = nidf::normalize(X, cfg.normalize_mode);
        const nidf::IntervalViews views = nidf::build_views(Xn, cfg.interval);
        const auto scores = nidf::score_views(views, cfg.selector, cfg.selector_cfg);
        const auto ids = feature_id_list(X);
        const std::string stem = nidf::dataset_stem(score_data);
        for (std::size_t i = 0; i < 4; ++i) {
            const std::string p = out_path(
                cfg, stem, std::string(".score.") + nidf::view_tag_name(nidf::kViewOrder[i]) + ".csv");
            nidf::write_score_csv(ids, scores[i].values, p);
            std::cout << p << '\n';
        }
        return 0;
    }

    if (cmd_fuse->parsed()) {
        const DataMatrix X = load_dataset(fuse_data, fuse_lf);
        const DataMatrix Xn = nidf::normalize(X, cfg.normalize_mode);
        const std::string stem = nidf::dataset_stem(fuse_data);

        nidf::IntervalViews views;
        if (!fuse_views_stem.empty()) {
            for (std::size_t i = 0; i < 4; ++i) {
                DataMatrix v = nidf::load_csv(fuse_views_stem + nidf::kViewFileSuffix[i]);
                views.views[i] = std::move(v);
            }
        } else {
            views = nidf::build_views(Xn, cfg.interval);
        }

        std::vector<nidf::Vector> s_list;
        if (!fuse_scores_stem.empty()) {
            for (std::size_t i = 0; i < 4; ++i) {
                auto [ids, s] = nidf::read_score_csv(fuse_scores_stem + ".score." +
                                                     nidf::view_tag_name(nidf::kViewOrder[i]) +
                                                     ".csv");
                s_list.push_back(std::move(s));
            }
        } else {
            for (const auto& fs : nidf::score_views(views, cfg.selector, cfg.selector_cfg))
                s_list.push_back(fs.values);
        }

        std::vector<nidf::Matrix> A_list;
        for (std::size_t i = 0; i < 4; ++i) {
            auto A = nidf::abs_correlation(views.views[i], nidf::view_tag_name(nidf::kViewOrder[i]));
            A_list.push_back(nidf::psd_repair(A).values);
        }

        const nidf::FusionState st = nidf::run_nidf(A_list, s_list, cfg.fusion);
        if (st.qp_failures > 0)
            std::cerr << "warning: " << st.qp_failures << " QP solves hit the iteration cap\n";
        nidf::write_score_csv(feature_id_list(X), st.z, out_path(cfg, stem, ".z.csv"));
        nidf::write_json(nidf::fusion_json(st), out_path(cfg, stem, ".fusion.json"));
        std::cout << out_path(cfg, stem, ".z.csv") << '\n';
        return st.converged ? 0 : 3;
    }

    if (cmd_eval->parsed()) {
        const DataMatrix X = load_dataset(eval_data, eval_lf);
        if (!X.has_labels()) throw nidf::InputError("labels required for eval");
        const DataMatrix Xn = nidf::normalize(X, cfg.normalize_mode);
        auto [ids, score] = nidf::read_score_csv(eval_score);
        if (score.size() != X.n_features())
            throw nidf::InputError("score file has " + std::to_string(score.size()) +
                                   " entries, dataset has " + std::to_string(X.n_features()) +
                                   " features");
        std::vector<int> grid = cfg.m_grid.empty() ? nidf::default_m_grid(X.n_features()) : cfg.m_grid;
        nidf::KMeansConfig kcfg = cfg.kmeans;
        kcfg.seed = cfg.seed;
        const nidf::EvalReport report = nidf::evaluate_selection(
            Xn, score, grid, kcfg, "external", nidf::dataset_stem(eval_data));
        const std::string p = out_path(cfg, nidf::dataset_stem(eval_data), ".eval.json");
        nidf::write_json(nidf::eval_json(report, nullptr, cfg.timing), p);
        std::cout << p << '\n';
        if (!eval_csv_row.empty()) {
            std::ofstream row(eval_csv_row);
            row << "dataset," << report.method_id << "_acc," << report.method_id << "_nmi\n"
                << report.dataset_id << ',' << nidf::detail::format_double(report.acc_avg) << ','
                << nidf::detail::format_double(report.nmi_avg) << '\n';
        }
        return 0;
    }

    if (cmd_pipe->parsed()) {
        const DataMatrix X = load_dataset(pipe_data, pipe_lf);
        const std::string stem = nidf::dataset_stem(pipe_data);
        if (cfg.eval_mode == nidf::EvalMode::On && !X.has_labels())
            throw nidf::InputError("labels required for eval");
        const nidf::PipelineResult res = nidf::run_pipeline(X, cfg, stem);
        if (res.fusion.qp_failures > 0)
            std::cerr << "warning: " << res.fusion.qp_failures << " QP solves hit the iteration cap\n";

        nidf::write_score_csv(feature_id_list(X), res.fusion.z, out_path(cfg, stem, ".z.csv"));
        nidf::write_json(nidf::fusion_json(res.fusion), out_path(cfg, stem, ".fusion.json"));
        write_selected_csv(X, res.fusion, res.selected, out_path(cfg, stem, ".selected.csv"));
        if (cfg.dump_redundancy) {
            for (const auto& A : res.redundancy) {
                DataMatrix dump;
                dump.values = A.values;
                nidf::write_csv(dump, out_path(cfg, stem, ".redundancy." + A.view_tag + ".csv"),
                                false);
            }
        }
        if (res.eval) {
            nidf::EvalReport report = *res.eval;
            report.runtime_ms = res.runtime_ms;  // whole pipeline, not just eval
            nidf::write_json(nidf::eval_json(report, &res.fusion, cfg.timing),
                             out_path(cfg, stem, ".eval.json"));
        }
        std::cout << out_path(cfg, stem, ".z.csv") << '\n';
        return res.fusion.converged ? 0 : 3;
    }

    if (cmd_bench->parsed()) {
        std::vector<DataMatrix> datasets;
        std::vector<std::string> ids;
        for (const std::string& path : bench_data) {
            DataMatrix X = load_dataset(path, bench_lf);
            if (!X.has_labels())
                throw nidf::InputError(path + ": labels required for bench");
            datasets.push_back(std::move(X));
            ids.push_back(nidf::dataset_stem(path));
        }
        std::vector<nidf::SelectorKind> selectors;
        for (const std::string& s : split_list(bench_selectors))
            selectors.push_back(nidf::parse_selector(s));

        const nidf::BenchTable table = nidf::run_bench(datasets, ids, selectors, cfg);
        const std::string p = bench_out.empty()
                                  ? (fs::path(cfg.out_dir) / "bench.csv").string()
                                  : bench_out;
        fs::create_directories(fs::path(p).parent_path().empty() ? "." : fs::path(p).parent_path().string());
        std::ofstream out(p);
        out << table.to_csv();
        std::cout << p << '\n';
        for (std::size_t r = 0; r < table.datasets.size(); ++r)
            for (std::size_t c = 0; c < table.methods.size(); ++c)
                if (!table.cells[r][c].ok)
                    std::cerr << "ERR cell (" << table.datasets[r] << ", " << table.methods[c]
                              << "): " << table.cells[r][c].error << '\n';
        return table.any_ok() ? 0 : 2;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const nidf::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const nidf::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
