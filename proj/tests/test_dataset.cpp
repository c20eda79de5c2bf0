#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "voxsel/dataset.hpp"

using namespace voxsel;
using testutil::TempFile;

namespace {

std::string toy_csv() {
    return testutil::make_csv({"f0", "f1", "f2", "f3"}, {"a", "a", "a", "b", "b", "b"},
                              {0, 0, 0, 1, 1, 1},
                              {{1.0, 2.0, 3.0, 4.0},
                               {1.1, 2.1, 3.1, 4.1},
                               {0.9, 1.9, 2.9, 3.9},
                               {5.0, 6.0, 7.0, 8.0},
                               {5.1, 6.1, 7.1, 8.1},
                               {4.9, 5.9, 6.9, 7.9}});
}

// header id,g0..g752,class with one healthy and one pd subject (3 rows each)
std::string canonical_width_csv() {
    std::ostringstream os;
    os << "id";
    for (int f = 0; f < 753; ++f) os << ",c" << f;
    os << ",class\n";
    for (int row = 0; row < 6; ++row) {
        const int subject = row / 3;
        os << "p" << subject;
        for (int f = 0; f < 753; ++f) os << "," << (f % 7) + 0.5 * subject;
        os << "," << subject;
        os << "\n";
    }
    return os.str();
}

}  // namespace

TEST_CASE("group map matches the canonical per-group totals") {
    GroupMap gm;
    CHECK(gm.total_columns() == 753);
    std::map<FeatureGroup, int> counts;
    for (const auto& [g, n] : gm.ranges()) counts[g] += n;
    CHECK(counts[FeatureGroup::Gender] == 1);
    CHECK(counts[FeatureGroup::G1] == 21);
    CHECK(counts[FeatureGroup::G2] == 11);
    CHECK(counts[FeatureGroup::G3] == 84);
    CHECK(counts[FeatureGroup::G4] == 182);
    CHECK(counts[FeatureGroup::G5] == 22);
    CHECK(counts[FeatureGroup::G6] == 432);
    CHECK(gm.group_at(0) == FeatureGroup::Gender);
    CHECK(gm.group_at(1) == FeatureGroup::G1);
    CHECK(gm.group_at(21) == FeatureGroup::G1);
    CHECK(gm.group_at(22) == FeatureGroup::G2);
    CHECK(gm.group_at(752) == FeatureGroup::G6);
    CHECK_THROWS_AS(gm.group_at(753), ArgumentError);
}

TEST_CASE("toy file loads with unknown groups") {
    TempFile f(toy_csv());
    Dataset d = load_dataset(f.path());
    CHECK(d.n_samples() == 6);
    CHECK(d.n_features() == 4);
    CHECK(d.subject_count() == 2);
    CHECK(d.labels == std::vector<int>{0, 0, 0, 1, 1, 1});
    CHECK(d.column_names == std::vector<std::string>{"f0", "f1", "f2", "f3"});
    for (auto g : d.group_of) CHECK(g == FeatureGroup::Unknown);
    CHECK_FALSE(d.ragged_subject_groups);
    CHECK(d.features(0, 0) == doctest::Approx(1.0));
    CHECK(d.features(5, 3) == doctest::Approx(7.9));
}

TEST_CASE("753-column files get positional group assignment") {
    TempFile f(canonical_width_csv());
    Dataset d = load_dataset(f.path());
    CHECK(d.n_features() == 753);
    CHECK(d.group_of[0] == FeatureGroup::Gender);
    CHECK(d.group_of[1] == FeatureGroup::G1);
    CHECK(d.group_of[22] == FeatureGroup::G2);
    CHECK(d.group_of[32] == FeatureGroup::G2);
    CHECK(d.group_of[33] == FeatureGroup::G3);
    CHECK(d.group_of[752] == FeatureGroup::G6);
}

TEST_CASE("load_dataset is deterministic") {
    TempFile f(toy_csv());
    Dataset a = load_dataset(f.path());
    Dataset b = load_dataset(f.path());
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    CHECK(a.subject_ids == b.subject_ids);
}

TEST_CASE("inconsistent subject labels are rejected") {
    auto csv = testutil::make_csv({"f0"}, {"7", "7"}, {0, 1}, {{1.0}, {2.0}});
    TempFile f(csv);
    CHECK_THROWS_AS(load_dataset(f.path()), IntegrityError);
}

TEST_CASE("malformed cells name the row and column") {
    TempFile f("id,f0,class\na,1.5,0\nb,oops,1\n");
    CHECK_THROWS_WITH_AS(load_dataset(f.path()),
                         doctest::Contains("row 2"), ParseError);
    TempFile g("id,f0,class\na,1.5,0\nb,,1\n");
    CHECK_THROWS_AS(load_dataset(g.path()), IntegrityError);
}

TEST_CASE("labels outside {0,1} are rejected") {
    TempFile f("id,f0,class\na,1.5,2\n");
    CHECK_THROWS_AS(load_dataset(f.path()), IntegrityError);
}

TEST_CASE("missing file and missing columns") {
    CHECK_THROWS_AS(load_dataset("/nonexistent/nope.csv"), IoError);
    TempFile f("idx,f0,class\na,1,0\n");
    CHECK_THROWS_AS(load_dataset(f.path()), ParseError);  // no id column
    LoadOptions opts;
    opts.label_column = "target";
    TempFile g("id,f0,class\na,1,0\n");
    CHECK_THROWS_AS(load_dataset(g.path(), opts), ParseError);
}

TEST_CASE("ragged subject groups only set a warning flag") {
    auto csv = testutil::make_csv({"f0"}, {"a", "a", "b"}, {0, 0, 1}, {{1.0}, {2.0}, {3.0}});
    TempFile f(csv);
    Dataset d = load_dataset(f.path());
    CHECK(d.ragged_subject_groups);
}

TEST_CASE("group override file reassigns groups by column name") {
    TempFile data(toy_csv());
    TempFile override_file("f0,G3\nf2,G6\n", ".txt");
    LoadOptions opts;
    opts.group_override_path = override_file.path();
    Dataset d = load_dataset(data.path(), opts);
    CHECK(d.group_of[0] == FeatureGroup::G3);
    CHECK(d.group_of[1] == FeatureGroup::Unknown);
    CHECK(d.group_of[2] == FeatureGroup::G6);
}

TEST_CASE("standardizer fit: hand-checked values") {
    auto csv = testutil::make_csv({"f0", "f1", "f2"}, {"a", "a", "b"}, {0, 0, 1},
                                  {{5.0, 1.0, 1.0}, {5.0, 2.0, 2.0}, {5.0, 3.0, 3.0}});
    TempFile f(csv);
    Dataset d = load_dataset(f.path());
    std::vector<std::size_t> all{0, 1, 2};
    Standardizer s = fit_standardizer(d, all);

    // constant column
    CHECK(s.mean[0] == doctest::Approx(5.0));
    CHECK(s.stddev[0] == 0.0);
    CHECK(s.zero_variance[0] == 1);
    CHECK(s.any_zero_variance());
    // population sd of [1,2,3] is sqrt(2/3)
    CHECK(s.mean[1] == doctest::Approx(2.0));
    CHECK(s.stddev[1] == doctest::Approx(std::sqrt(2.0 / 3.0)));
    // identical columns get identical parameters
    CHECK(s.mean[1] == s.mean[2]);
    CHECK(s.stddev[1] == s.stddev[2]);

    CHECK_THROWS_AS(fit_standardizer(d, {}), ArgumentError);
}

TEST_CASE("apply_standardizer semantics") {
    auto csv = testutil::make_csv({"f0", "f1"}, {"a", "a", "b", "b"}, {0, 0, 1, 1},
                                  {{1.0, 7.0}, {2.0, 7.0}, {3.0, 7.0}, {4.0, 7.0}});
    TempFile f(csv);
    Dataset d = load_dataset(f.path());
    std::vector<std::size_t> all{0, 1, 2, 3};
    Standardizer s = fit_standardizer(d, all);

    Eigen::MatrixXd z = apply_standardizer(s, d, all);
    // standardizing the fit rows re-centers each column
    CHECK(std::abs(z.col(0).mean()) < 1e-10);
    // zero-variance column maps to zero
    CHECK(z.col(1).cwiseAbs().maxCoeff() == 0.0);

    // x=4 with mean 2, sd 1 -> 2
    Standardizer manual;
    manual.mean = Eigen::VectorXd::Constant(1, 2.0);
    manual.stddev = Eigen::VectorXd::Constant(1, 1.0);
    manual.zero_variance = {0};
    manual.passthrough = {0};
    Eigen::MatrixXd one(1, 1);
    one << 4.0;
    CHECK(apply_standardizer(manual, one)(0, 0) == doctest::Approx(2.0));

    Eigen::MatrixXd wrong(1, 3);
    CHECK_THROWS_AS(apply_standardizer(s, wrong), ArgumentError);
}

TEST_CASE("gender column passes through unscaled") {
    TempFile f(canonical_width_csv());
    Dataset d = load_dataset(f.path());
    std::vector<std::size_t> all(static_cast<std::size_t>(d.n_samples()));
    std::iota(all.begin(), all.end(), std::size_t{0});
    Standardizer s = fit_standardizer(d, all);
    CHECK(s.passthrough[0] == 1);
    CHECK(s.passthrough[1] == 0);
    Eigen::MatrixXd z = apply_standardizer(s, d, all);
    CHECK(z.col(0) == d.features.col(0));  // untouched
}

TEST_CASE("standardize round-trips within 1e-10") {
    Rng rng(17);
    Dataset d = testutil::synthetic_grouped(8, 3, 5, 1.0, 99);
    std::vector<std::size_t> rows{0, 1, 2, 5, 7, 9, 12, 15, 20};
    Standardizer s = fit_standardizer(d, rows);
    Eigen::MatrixXd z = apply_standardizer(s, d, rows);
    Eigen::MatrixXd raw = rows_of(d.features, rows);
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        if (s.zero_variance[static_cast<std::size_t>(c)] ||
            s.passthrough[static_cast<std::size_t>(c)])
            continue;
        Eigen::VectorXd back = z.col(c) * s.stddev[c] + Eigen::VectorXd::Constant(z.rows(), s.mean[c]);
        CHECK((back - raw.col(c)).cwiseAbs().maxCoeff() < 1e-10);
    }
}
