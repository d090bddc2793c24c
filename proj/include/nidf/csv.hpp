#pragma once

#include "nidf/types.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace nidf {

/// Which column of a CSV file holds the class label, if any.
struct LabelColumn {
    enum class Kind { None, ByName, ByIndex } kind = Kind::None;
    std::string name;
    int index = -1;

    static LabelColumn none() { return {}; }
    static LabelColumn by_name(std::string n) { return {Kind::ByName, std::move(n), -1}; }
    static LabelColumn by_index(int i) { return {Kind::ByIndex, {}, i}; }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

inline bool parse_double(const std::string& raw, double& out) {
    const std::string s = trim(raw);
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// Shortest representation that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace detail

/// Load a comma-separated dataset. Feature columns must be numeric; the label
/// column (optional) may hold arbitrary tokens, remapped to class ids 0..c-1
/// in order of first appearance. Row numbers in errors are 1-based file lines.
inline DataMatrix load_csv(const std::string& path, const LabelColumn& label = LabelColumn::none(),
                           bool has_header = true) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);

    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    // Tolerate a single trailing blank line.
    while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw InputError(path + ": file is empty");

    std::size_t first_data = 0;
    std::vector<std::string> header;
    if (has_header) {
        header = detail::split_csv_line(lines[0]);
        for (auto& h : header) h = detail::trim(h);
        first_data = 1;
    }

    if (label.kind == LabelColumn::Kind::ByName && !has_header)
        throw InputError("label column by name requires a header line");

    const std::size_t width =
        has_header ? header.size() : detail::split_csv_line(lines[first_data]).size();

    int label_idx = -1;
    if (label.kind == LabelColumn::Kind::ByName) {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == label.name) label_idx = static_cast<int>(j);
        if (label_idx < 0) throw InputError(path + ": no column named '" + label.name + "'");
    } else if (label.kind == LabelColumn::Kind::ByIndex) {
        if (label.index < 0 || static_cast<std::size_t>(label.index) >= width)
            throw InputError(path + ": label column index " + std::to_string(label.index) +
                             " out of range (file has " + std::to_string(width) + " columns)");
        label_idx = label.index;
    }

    auto column_display = [&](std::size_t j) {
        if (has_header) return header[j];
        return std::to_string(j);
    };

    const std::size_t n_rows = lines.size() - first_data;
    const std::size_t n_feat = width - (label_idx >= 0 ? 1 : 0);
    if (n_feat == 0) throw InputError(path + ": no feature columns left after label removal");

    Matrix values(static_cast<Index>(n_rows), static_cast<Index>(n_feat));
    std::vector<int> labels;
    std::vector<std::string> label_tokens;  // first-appearance remap table
    std::unordered_map<std::string, int> label_ids;

    for (std::size_t r = 0; r < n_rows; ++r) {
        const std::size_t file_line = first_data + r + 1;  // 1-based
        auto cells = detail::split_csv_line(lines[first_data + r]);
        if (cells.size() != width)
            throw InputError(path + ": row " + std::to_string(file_line) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(width));
        std::size_t fj = 0;
        for (std::size_t j = 0; j < width; ++j) {
            if (static_cast<int>(j) == label_idx) {
                const std::string tok = detail::trim(cells[j]);
                auto it = label_ids.find(tok);
                int id;
                if (it == label_ids.end()) {
                    id = static_cast<int>(label_tokens.size());
                    label_ids.emplace(tok, id);
                    label_tokens.push_back(tok);
                } else {
                    id = it->second;
                }
                labels.push_back(id);
                continue;
            }
            double v;
            if (!detail::parse_double(cells[j], v))
                throw InputError(path + ": non-numeric value '" + detail::trim(cells[j]) +
                                 "' at row " + std::to_string(file_line) + ", column " +
                                 column_display(j));
            values(static_cast<Index>(r), static_cast<Index>(fj++)) = v;
        }
    }

    DataMatrix X;
    X.values = std::move(values);
    X.labels = std::move(labels);
    if (has_header) {
        for (std::size_t j = 0; j < width; ++j)
            if (static_cast<int>(j) != label_idx) X.feature_ids.push_back(header[j]);
    }
    X.validate();
    return X;
}

/// Write features (and optionally labels) back out with round-trip precision.
inline void write_csv(const DataMatrix& X, const std::string& path, bool with_header = true,
                      bool include_labels = false, const std::string& label_name = "label") {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    const Index n = X.n_samples(), d = X.n_features();
    if (with_header) {
        for (Index j = 0; j < d; ++j) {
            if (j) out << ',';
            out << X.feature_id(j);
        }
        if (include_labels && X.has_labels()) out << ',' << label_name;
        out << '\n';
    }
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) {
            if (j) out << ',';
            out << detail::format_double(X.values(i, j));
        }
        if (include_labels && X.has_labels()) out << ',' << X.labels[static_cast<std::size_t>(i)];
        out << '\n';
    }
    if (!out) throw InputError("write failed: " + path);
}

/// (feature_id, score) table used for per-view scores and the fused ranking.
inline void write_score_csv(const std::vector<std::string>& ids, const Vector& score,
                            const std::string& path) {
    if (static_cast<Index>(ids.size()) != score.size())
        throw InputError("score/id length mismatch");
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << "feature_id,score\n";
    for (Index j = 0; j < score.size(); ++j)
        out << ids[static_cast<std::size_t>(j)] << ',' << detail::format_double(score[j]) << '\n';
    if (!out) throw InputError("write failed: " + path);
}

inline std::pair<std::vector<std::string>, Vector> read_score_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": file is empty");
    std::vector<std::string> ids;
    std::vector<double> vals;
    std::size_t file_line = 1;
    while (std::getline(in, line)) {
        ++file_line;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != 2)
            throw InputError(path + ": row " + std::to_string(file_line) +
                             " must be feature_id,score");
        double v;
        if (!detail::parse_double(cells[1], v))
            throw InputError(path + ": non-numeric score at row " + std::to_string(file_line));
        ids.push_back(detail::trim(cells[0]));
        vals.push_back(v);
    }
    if (vals.empty()) throw InputError(path + ": no score rows");
    return {ids, Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()))};
}

}  // namespace nidf
