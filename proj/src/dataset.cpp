#include "voxsel/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace voxsel {

std::string to_string(FeatureGroup g) {
    switch (g) {
        case FeatureGroup::Gender: return "GENDER";
        case FeatureGroup::G1: return "G1";
        case FeatureGroup::G2: return "G2";
        case FeatureGroup::G3: return "G3";
        case FeatureGroup::G4: return "G4";
        case FeatureGroup::G5: return "G5";
        case FeatureGroup::G6: return "G6";
        case FeatureGroup::Unknown: break;
    }
    return "UNKNOWN";
}

FeatureGroup feature_group_from_string(const std::string& s) {
    if (s == "GENDER") return FeatureGroup::Gender;
    if (s == "G1") return FeatureGroup::G1;
    if (s == "G2") return FeatureGroup::G2;
    if (s == "G3") return FeatureGroup::G3;
    if (s == "G4") return FeatureGroup::G4;
    if (s == "G5") return FeatureGroup::G5;
    if (s == "G6") return FeatureGroup::G6;
    if (s == "UNKNOWN") return FeatureGroup::Unknown;
    throw ArgumentError("unknown feature group tag: " + s);
}

GroupMap::GroupMap()
    : ranges_{{FeatureGroup::Gender, 1}, {FeatureGroup::G1, 21}, {FeatureGroup::G2, 11},
              {FeatureGroup::G3, 84},    {FeatureGroup::G4, 182}, {FeatureGroup::G5, 22},
              {FeatureGroup::G6, 432}} {}

int GroupMap::total_columns() const {
    int total = 0;
    for (const auto& [g, n] : ranges_) total += n;
    return total;
}

FeatureGroup GroupMap::group_at(int column) const {
    int offset = 0;
    for (const auto& [g, n] : ranges_) {
        if (column < offset + n) return g;
        offset += n;
    }
    throw ArgumentError("column index " + std::to_string(column) + " outside group map");
}

std::vector<std::string> Dataset::subjects() const {
    std::vector<std::string> out;
    std::unordered_map<std::string, bool> seen;
    for (const auto& id : subject_ids) {
        if (!seen.count(id)) {
            seen[id] = true;
            out.push_back(id);
        }
    }
    return out;
}

std::unordered_map<std::string, int> Dataset::subject_labels() const {
    std::unordered_map<std::string, int> out;
    for (std::size_t i = 0; i < subject_ids.size(); ++i) out[subject_ids[i]] = labels[i];
    return out;
}

std::unordered_map<std::string, std::vector<std::size_t>> Dataset::rows_by_subject() const {
    std::unordered_map<std::string, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < subject_ids.size(); ++i) out[subject_ids[i]].push_back(i);
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    if (cell.empty())
        throw IntegrityError("missing value at data row " + std::to_string(row) + ", column '" +
                             column + "'");
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("malformed numeric cell '" + cell + "' at data row " +
                         std::to_string(row) + ", column '" + column + "'");
    if (!std::isfinite(value))
        throw IntegrityError("non-finite value at data row " + std::to_string(row) +
                             ", column '" + column + "'");
    return value;
}

int parse_label(const std::string& cell, std::size_t row) {
    double v = parse_cell(cell, row, "label");
    if (v == 0.0) return 0;
    if (v == 1.0) return 1;
    throw IntegrityError("label must be 0 or 1, got '" + cell + "' at data row " +
                         std::to_string(row));
}

std::vector<FeatureGroup> load_group_override(const std::string& path,
                                              const std::vector<std::string>& column_names) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open group override file: " + path);
    std::unordered_map<std::string, FeatureGroup> by_name;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 2)
            throw ParseError("group override line " + std::to_string(lineno) +
                             ": expected 'column_name,group_tag'");
        by_name[cells[0]] = feature_group_from_string(cells[1]);
    }
    std::vector<FeatureGroup> out(column_names.size(), FeatureGroup::Unknown);
    for (std::size_t c = 0; c < column_names.size(); ++c) {
        auto it = by_name.find(column_names[c]);
        if (it != by_name.end()) out[c] = it->second;
    }
    return out;
}

}  // namespace

Dataset load_dataset(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) throw ParseError("empty dataset file: " + path);
    if (header_line.rfind("\xEF\xBB\xBF", 0) == 0) header_line.erase(0, 3);  // UTF-8 BOM
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
    auto header = split_csv_line(header_line);

    std::ptrdiff_t id_col = -1, label_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == opts.id_column) id_col = static_cast<std::ptrdiff_t>(i);
        if (header[i] == opts.label_column) label_col = static_cast<std::ptrdiff_t>(i);
    }
    if (id_col < 0) throw ParseError("id column '" + opts.id_column + "' not found in header");
    if (label_col < 0)
        throw ParseError("label column '" + opts.label_column + "' not found in header");

    Dataset d;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (static_cast<std::ptrdiff_t>(i) == id_col || static_cast<std::ptrdiff_t>(i) == label_col)
            continue;
        d.column_names.push_back(header[i]);
    }

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t data_row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++data_row;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw ParseError("data row " + std::to_string(data_row) + " has " +
                             std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(header.size()));
        std::vector<double> row;
        row.reserve(header.size() - 2);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (static_cast<std::ptrdiff_t>(i) == id_col) {
                d.subject_ids.push_back(cells[i]);
            } else if (static_cast<std::ptrdiff_t>(i) == label_col) {
                d.labels.push_back(parse_label(cells[i], data_row));
            } else {
                row.push_back(parse_cell(cells[i], data_row, header[i]));
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("dataset has a header but no data rows: " + path);

    d.features.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(d.column_names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            d.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];

    // Per-subject invariants: constant label, constant sample count (ragged -> warning flag).
    std::unordered_map<std::string, int> label_of;
    std::unordered_map<std::string, int> count_of;
    for (std::size_t i = 0; i < d.subject_ids.size(); ++i) {
        const auto& id = d.subject_ids[i];
        auto it = label_of.find(id);
        if (it == label_of.end()) {
            label_of[id] = d.labels[i];
        } else if (it->second != d.labels[i]) {
            throw IntegrityError("subject '" + id + "' has inconsistent labels across rows");
        }
        ++count_of[id];
    }
    int common = -1;
    for (const auto& [id, n] : count_of) {
        if (common < 0) common = n;
        if (n != common) d.ragged_subject_groups = true;
    }

    GroupMap gm;
    if (static_cast<int>(d.column_names.size()) == gm.total_columns()) {
        d.group_of.resize(d.column_names.size());
        for (std::size_t c = 0; c < d.column_names.size(); ++c)
            d.group_of[c] = gm.group_at(static_cast<int>(c));
    } else {
        d.group_of.assign(d.column_names.size(), FeatureGroup::Unknown);
    }
    if (opts.group_override_path)
        d.group_of = load_group_override(*opts.group_override_path, d.column_names);

    return d;
}

Standardizer fit_standardizer(const Dataset& d, const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw ArgumentError("fit_standardizer: row set must be non-empty");
    const Eigen::Index F = d.n_features();
    Standardizer s;
    s.mean.resize(F);
    s.stddev.resize(F);
    s.zero_variance.assign(static_cast<std::size_t>(F), 0);
    s.passthrough.assign(static_cast<std::size_t>(F), 0);

    const double n = static_cast<double>(rows.size());
    for (Eigen::Index c = 0; c < F; ++c) {
        double sum = 0.0;
        for (std::size_t r : rows) sum += d.features(static_cast<Eigen::Index>(r), c);
        const double mean = sum / n;
        double sq = 0.0;
        for (std::size_t r : rows) {
            const double dx = d.features(static_cast<Eigen::Index>(r), c) - mean;
            sq += dx * dx;
        }
        s.mean[c] = mean;
        s.stddev[c] = std::sqrt(sq / n);
        if (s.stddev[c] == 0.0) s.zero_variance[static_cast<std::size_t>(c)] = 1;
        if (!d.group_of.empty() && d.group_of[static_cast<std::size_t>(c)] == FeatureGroup::Gender)
            s.passthrough[static_cast<std::size_t>(c)] = 1;
    }
    return s;
}

bool Standardizer::any_zero_variance() const {
    return std::any_of(zero_variance.begin(), zero_variance.end(), [](char c) { return c != 0; });
}

Eigen::MatrixXd apply_standardizer(const Standardizer& s, const Eigen::MatrixXd& raw_rows) {
    if (raw_rows.cols() != s.mean.size())
        throw ArgumentError("apply_standardizer: column count mismatch (" +
                            std::to_string(raw_rows.cols()) + " vs " +
                            std::to_string(s.mean.size()) + ")");
    Eigen::MatrixXd z = raw_rows;
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        if (s.passthrough[static_cast<std::size_t>(c)]) continue;
        if (s.zero_variance[static_cast<std::size_t>(c)]) {
            z.col(c).setZero();
        } else {
            z.col(c) = (z.col(c).array() - s.mean[c]) / s.stddev[c];
        }
    }
    return z;
}

Eigen::MatrixXd apply_standardizer(const Standardizer& s, const Dataset& d,
                                   const std::vector<std::size_t>& rows) {
    return apply_standardizer(s, rows_of(d.features, rows));
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

Eigen::MatrixXd columns_of(const Eigen::MatrixXd& m, const std::vector<int>& cols) {
    Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] < 0 || cols[i] >= m.cols())
            throw ArgumentError("columns_of: index " + std::to_string(cols[i]) + " out of range");
        out.col(static_cast<Eigen::Index>(i)) = m.col(cols[i]);
    }
    return out;
}

std::vector<int> labels_of(const Dataset& d, const std::vector<std::size_t>& rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(d.labels[r]);
    return out;
}

}  // namespace voxsel
