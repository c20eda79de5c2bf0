#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "voxsel/common.hpp"

namespace voxsel {

enum class FeatureGroup { Gender, G1, G2, G3, G4, G5, G6, Unknown };

std::string to_string(FeatureGroup g);
FeatureGroup feature_group_from_string(const std::string& s);

// Positional column->group assignment for the canonical 753-column layout:
// gender first, then G1..G6 blocks.
class GroupMap {
  public:
    GroupMap();  // canonical counts: 1,21,11,84,182,22,432

    const std::vector<std::pair<FeatureGroup, int>>& ranges() const { return ranges_; }
    int total_columns() const;
    FeatureGroup group_at(int column) const;

  private:
    std::vector<std::pair<FeatureGroup, int>> ranges_;
};

// Immutable after loading; safe to share across worker threads.
struct Dataset {
    Eigen::MatrixXd features;              // n_samples x n_features
    std::vector<int> labels;               // 0 = healthy, 1 = PD
    std::vector<std::string> subject_ids;  // per row
    std::vector<std::string> column_names;
    std::vector<FeatureGroup> group_of;    // per column
    bool ragged_subject_groups = false;    // subjects with unequal sample counts

    Eigen::Index n_samples() const { return features.rows(); }
    Eigen::Index n_features() const { return features.cols(); }

    // Distinct subjects in order of first appearance.
    std::vector<std::string> subjects() const;
    // Label of a subject (constant across its rows by invariant).
    std::unordered_map<std::string, int> subject_labels() const;
    // Row indices per subject, in row order.
    std::unordered_map<std::string, std::vector<std::size_t>> rows_by_subject() const;
    std::size_t subject_count() const { return subjects().size(); }
};

struct LoadOptions {
    std::string id_column = "id";
    std::string label_column = "class";
    // Optional sidecar file overriding positional group assignment:
    // CSV of (column_name, group_tag) pairs.
    std::optional<std::string> group_override_path;
};

// CSV with header row, '.' decimal point, one sample per row. The id column is
// stripped from the feature matrix; the label column becomes labels.
Dataset load_dataset(const std::string& path, const LoadOptions& opts = {});

// Per-column z-scoring parameters, fitted on training rows only.
// Population (1/n) variance convention throughout the project.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;               // >= 0; 0 marks a zero-variance column
    std::vector<char> zero_variance;      // per column
    std::vector<char> passthrough;        // gender columns are not scaled

    bool any_zero_variance() const;
};

Standardizer fit_standardizer(const Dataset& d, const std::vector<std::size_t>& rows);

// z = (x - mean) / sd per column; zero-variance columns map to 0; passthrough
// columns are copied unchanged.
Eigen::MatrixXd apply_standardizer(const Standardizer& s, const Dataset& d,
                                   const std::vector<std::size_t>& rows);
Eigen::MatrixXd apply_standardizer(const Standardizer& s, const Eigen::MatrixXd& raw_rows);

// Row-slice of the raw feature matrix (no scaling).
Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows);

// Column-slice in the given order.
Eigen::MatrixXd columns_of(const Eigen::MatrixXd& m, const std::vector<int>& cols);

std::vector<int> labels_of(const Dataset& d, const std::vector<std::size_t>& rows);

}  // namespace voxsel
