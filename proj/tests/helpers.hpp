#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "voxsel/common.hpp"
#include "voxsel/dataset.hpp"

namespace testutil {

// Temp file that removes itself; contents written on construction.
class TempFile {
  public:
    explicit TempFile(const std::string& contents, const std::string& suffix = ".csv") {
        static int counter = 0;
        path_ = (std::filesystem::temp_directory_path() /
                 ("voxsel_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++) + suffix))
                    .string();
        std::ofstream out(path_, std::ios::binary);
        out << contents;
    }
    ~TempFile() { std::error_code ec; std::filesystem::remove(path_, ec); }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

class TempDir {
  public:
    TempDir() {
        static int counter = 0;
        path_ = (std::filesystem::temp_directory_path() /
                 ("voxsel_testdir_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++)))
                    .string();
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::error_code ec; std::filesystem::remove_all(path_, ec); }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

// CSV with subjects of `rows_per_subject` rows; labels per subject, features
// supplied row-major.
inline std::string make_csv(const std::vector<std::string>& feature_names,
                            const std::vector<std::string>& subject_ids,
                            const std::vector<int>& labels,
                            const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    os << "id";
    for (const auto& f : feature_names) os << "," << f;
    os << ",class\n";
    os.precision(17);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        os << subject_ids[r];
        for (double v : rows[r]) os << "," << v;
        os << "," << labels[r] << "\n";
    }
    return os.str();
}

// Synthetic person-grouped dataset: n_subjects x samples_each rows, n_features
// columns. Feature 0 separates the classes by `gap` when informative > 0;
// remaining columns are noise. Subject effects keep rows of one person close.
inline voxsel::Dataset synthetic_grouped(int n_subjects, int samples_each, int n_features,
                                         double gap, std::uint64_t seed,
                                         double healthy_fraction = 0.5) {
    voxsel::Dataset d;
    voxsel::Rng rng(seed);
    const int n = n_subjects * samples_each;
    d.features.resize(n, n_features);
    const int healthy = std::max(1, static_cast<int>(healthy_fraction * n_subjects));
    int row = 0;
    for (int s = 0; s < n_subjects; ++s) {
        const int label = s < healthy ? 0 : 1;
        std::vector<double> base(static_cast<std::size_t>(n_features));
        for (auto& b : base) b = voxsel::uniform_range(rng, -1.0, 1.0);
        for (int k = 0; k < samples_each; ++k) {
            for (int f = 0; f < n_features; ++f) {
                double v = base[static_cast<std::size_t>(f)] +
                           0.1 * voxsel::uniform_range(rng, -1.0, 1.0);
                if (f == 0) v += label * gap;
                d.features(row, f) = v;
            }
            d.subject_ids.push_back("s" + std::to_string(s));
            d.labels.push_back(label);
            ++row;
        }
    }
    d.column_names.resize(static_cast<std::size_t>(n_features));
    for (int f = 0; f < n_features; ++f) d.column_names[static_cast<std::size_t>(f)] = "f" + std::to_string(f);
    d.group_of.assign(static_cast<std::size_t>(n_features), voxsel::FeatureGroup::Unknown);
    return d;
}

}  // namespace testutil
