#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>
#include <unordered_set>

#include "doctest.h"
#include "helpers.hpp"
#include "voxsel/splits.hpp"

using namespace voxsel;

namespace {

// canonical structure: 252 subjects x 3 rows, 64 healthy
Dataset canonical_structure() {
    return testutil::synthetic_grouped(252, 3, 4, 1.0, 7, 64.0 / 252.0);
}

std::set<std::string> subjects_of(const Dataset& d, const std::vector<std::size_t>& rows) {
    std::set<std::string> s;
    for (auto r : rows) s.insert(d.subject_ids[r]);
    return s;
}

bool disjoint_subjects(const Dataset& d, const SplitPlan& p) {
    auto tr = subjects_of(d, p.train_rows);
    auto te = subjects_of(d, p.test_rows);
    for (const auto& s : te)
        if (tr.count(s)) return false;
    return true;
}

}  // namespace

TEST_CASE("grouped k-fold on the canonical structure") {
    Dataset d = canonical_structure();
    auto plans = grouped_kfold(d, 10, 42);
    REQUIRE(plans.size() == 10);

    std::vector<std::size_t> seen;
    for (const auto& p : plans) {
        const std::size_t n_subj = p.test_subjects.size();
        CHECK((n_subj == 25 || n_subj == 26));  // 252 = 10*25 + 2
        CHECK(disjoint_subjects(d, p));
        seen.insert(seen.end(), p.test_rows.begin(), p.test_rows.end());
        CHECK(p.train_rows.size() + p.test_rows.size() == 756);
    }
    // test sets partition the rows exactly
    std::sort(seen.begin(), seen.end());
    CHECK(seen.size() == 756);
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("k equal to subject count gives leave-one-person-out") {
    Dataset d = testutil::synthetic_grouped(8, 3, 2, 1.0, 11);
    auto plans = grouped_kfold(d, 8, 1);
    CHECK(plans.size() == 8);
    for (const auto& p : plans) {
        CHECK(p.test_subjects.size() == 1);
        CHECK(p.test_rows.size() == 3);
    }
    CHECK_THROWS_AS(grouped_kfold(d, 9, 1), ArgumentError);
}

TEST_CASE("stratified holdout: canonical subject arithmetic") {
    Dataset d = canonical_structure();
    SplitPlan p = stratified_holdout_by_person(d, 0.75, 0, 5);

    auto label_of = d.subject_labels();
    int train_healthy = 0, train_pd = 0, test_healthy = 0, test_pd = 0;
    for (const auto& s : p.train_subjects) (label_of[s] == 0 ? train_healthy : train_pd)++;
    for (const auto& s : p.test_subjects) (label_of[s] == 0 ? test_healthy : test_pd)++;

    CHECK(train_healthy == 48);  // round(0.75 * 64)
    CHECK(test_healthy == 16);
    CHECK(train_pd == 141);      // round(0.75 * 188)
    CHECK(test_pd == 47);
    CHECK(disjoint_subjects(d, p));
    CHECK(p.train_rows.size() + p.test_rows.size() == 756);
}

TEST_CASE("stratified holdout: minimum one test subject per class") {
    Dataset d = testutil::synthetic_grouped(4, 3, 2, 1.0, 3, 0.5);  // 2 healthy, 2 pd
    SplitPlan p = stratified_holdout_by_person(d, 0.75, 0, 9);
    auto label_of = d.subject_labels();
    int test_by_class[2] = {0, 0};
    for (const auto& s : p.test_subjects) ++test_by_class[label_of[s]];
    CHECK(test_by_class[0] == 1);
    CHECK(test_by_class[1] == 1);

    Dataset single = testutil::synthetic_grouped(3, 3, 2, 1.0, 3, 1.0 / 3.0);
    // healthy_fraction 1/3 of 3 subjects -> 1 healthy subject only
    CHECK_THROWS_AS(stratified_holdout_by_person(single, 0.75, 0, 1), ArgumentError);
}

TEST_CASE("stratified holdout determinism contract") {
    Dataset d = canonical_structure();
    SplitPlan a = stratified_holdout_by_person(d, 0.75, 3, 123);
    SplitPlan b = stratified_holdout_by_person(d, 0.75, 3, 123);
    SplitPlan c = stratified_holdout_by_person(d, 0.75, 4, 123);
    CHECK(a.train_rows == b.train_rows);
    CHECK(a.test_rows == b.test_rows);
    CHECK(a.train_rows != c.train_rows);
}

TEST_CASE("no subject ever crosses train/test over random group structures") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const int subjects = 4 + static_cast<int>(uniform_index(rng, 40));
        const int samples = 1 + static_cast<int>(uniform_index(rng, 4));
        const double healthy_frac = 0.2 + 0.6 * uniform01(rng);
        Dataset d = testutil::synthetic_grouped(subjects, samples, 3, 0.5, rng(), healthy_frac);

        auto label_of = d.subject_labels();
        int healthy_subj = 0;
        for (const auto& [s, lab] : label_of) healthy_subj += lab == 0 ? 1 : 0;
        const int pd_subj = subjects - healthy_subj;

        const int k = 2 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(subjects - 1)));
        auto plans = grouped_kfold(d, k, rng());
        std::vector<std::size_t> all_test;
        for (const auto& p : plans) {
            CHECK(disjoint_subjects(d, p));
            all_test.insert(all_test.end(), p.test_rows.begin(), p.test_rows.end());
        }
        std::sort(all_test.begin(), all_test.end());
        CHECK(all_test.size() == static_cast<std::size_t>(d.n_samples()));
        CHECK(std::adjacent_find(all_test.begin(), all_test.end()) == all_test.end());

        if (healthy_subj >= 2 && pd_subj >= 2) {
            SplitPlan p = stratified_holdout_by_person(d, 0.75, trial, rng());
            CHECK(disjoint_subjects(d, p));
            // class-wise train counts: round(0.75 * class size), bounded by >= 1 test
            int train_by_class[2] = {0, 0};
            for (const auto& s : p.train_subjects) ++train_by_class[label_of[s]];
            const int class_sizes[2] = {healthy_subj, pd_subj};
            for (int c = 0; c < 2; ++c) {
                int expect = static_cast<int>(std::lround(0.75 * class_sizes[c]));
                expect = std::min(expect, class_sizes[c] - 1);
                expect = std::max(expect, 1);
                CHECK(train_by_class[c] == expect);
            }
        }
    }
}

TEST_CASE("summarized LOO reduces to one row per subject") {
    Dataset d = testutil::synthetic_grouped(10, 3, 4, 1.0, 21);
    auto [reduced, plans] = summarized_loo(d, Aggregator::Mean);
    CHECK(reduced.n_samples() == 10);
    CHECK(plans.size() == 10);
    for (const auto& p : plans) {
        CHECK(p.test_rows.size() == 1);
        CHECK(p.train_rows.size() == 9);
    }
    // labels preserved per subject
    auto orig = d.subject_labels();
    for (std::size_t i = 0; i < reduced.subject_ids.size(); ++i)
        CHECK(reduced.labels[i] == orig[reduced.subject_ids[i]]);

    // mean of three identical rows reproduces the row
    Dataset flat = testutil::synthetic_grouped(2, 1, 3, 1.0, 5);
    Dataset three;
    three.features.resize(6, 3);
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < 3; ++k) {
            three.features.row(3 * s + k) = flat.features.row(s);
            three.subject_ids.push_back(flat.subject_ids[static_cast<std::size_t>(s)]);
            three.labels.push_back(flat.labels[static_cast<std::size_t>(s)]);
        }
    three.column_names = flat.column_names;
    three.group_of = flat.group_of;
    auto [red2, plans2] = summarized_loo(three, Aggregator::Mean);
    CHECK((red2.features.row(0) - flat.features.row(0)).cwiseAbs().maxCoeff() < 1e-12);

    auto [red3, plans3] = summarized_loo(three, Aggregator::Median);
    CHECK((red3.features.row(1) - flat.features.row(1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("plans serialize with scheme, seed and subject lists") {
    Dataset d = testutil::synthetic_grouped(6, 3, 2, 1.0, 2);
    SplitPlan p = stratified_holdout_by_person(d, 0.75, 2, 99);
    const std::string j = plan_to_json(p);
    CHECK(j.find("stratified_holdout_by_person") != std::string::npos);
    CHECK(j.find("\"rep_id\":2") != std::string::npos);
    CHECK(j.find("train_subjects") != std::string::npos);
}
