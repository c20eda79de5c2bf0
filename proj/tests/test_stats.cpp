#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "voxsel/common.hpp"
#include "voxsel/stats.hpp"

using namespace voxsel;

TEST_CASE("descending average ranks") {
    auto r = rank_desc_with_ties({3.0, 1.0, 2.0});
    CHECK(r == std::vector<double>{1.0, 3.0, 2.0});
    auto tied = rank_desc_with_ties({2.0, 2.0, 1.0});
    CHECK(tied == std::vector<double>{1.5, 1.5, 3.0});
    auto all = rank_desc_with_ties({5.0, 5.0, 5.0, 5.0});
    CHECK(all == std::vector<double>{2.5, 2.5, 2.5, 2.5});
}

TEST_CASE("chi-squared survival function against reference values") {
    CHECK(chi2_survival(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(chi2_survival(5.991464547107979, 2) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(chi2_survival(20.0, 1) == doctest::Approx(7.74421643104409e-06).epsilon(1e-9));
    CHECK(chi2_survival(0.5, 3) == doctest::Approx(0.918891411654676).epsilon(1e-12));
    CHECK(chi2_survival(45.0, 29) == doctest::Approx(0.0294240299253413).epsilon(1e-10));
    CHECK(chi2_survival(0.0, 4) == 1.0);
    CHECK(chi2_survival(-1.0, 4) == 1.0);
    CHECK_THROWS_AS(chi2_survival(1.0, 0), ArgumentError);
}

TEST_CASE("friedman test against reference values") {
    // 5 blocks of [1,2,3] and 3 of [2,1,3]
    std::vector<std::vector<double>> table;
    for (int i = 0; i < 5; ++i) table.push_back({1.0, 2.0, 3.0});
    for (int i = 0; i < 3; ++i) table.push_back({2.0, 1.0, 3.0});
    auto r = friedman_test(table);
    CHECK(r.statistic == doctest::Approx(12.25).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.002187491118182885).epsilon(1e-9));
    // treatment 3 has the biggest scores -> best (lowest) mean rank
    CHECK(r.mean_ranks[2] < r.mean_ranks[0]);
    CHECK(r.mean_ranks[2] < r.mean_ranks[1]);

    // tied-table value (tie-corrected form)
    std::vector<std::vector<double>> tied{{1.0, 1.0, 2.0},
                                          {2.0, 2.0, 1.0},
                                          {1.5, 1.5, 1.5},
                                          {3.0, 1.0, 1.0},
                                          {1.0, 2.0, 3.0}};
    auto rt = friedman_test(tied);
    CHECK(rt.statistic == doctest::Approx(0.15384615384615602).epsilon(1e-10));
    CHECK(rt.p_value == doctest::Approx(0.9259610786423149).epsilon(1e-9));

    // fully tied blocks degrade gracefully
    std::vector<std::vector<double>> flat(4, std::vector<double>{1.0, 1.0, 1.0});
    auto rf = friedman_test(flat);
    CHECK(rf.statistic == 0.0);
    CHECK(rf.p_value == 1.0);

    CHECK_THROWS_AS(friedman_test({{1.0, 2.0}}), ArgumentError);
    CHECK_THROWS_AS(friedman_test({{1.0, 2.0}, {1.0}}), ArgumentError);
}

TEST_CASE("friedman statistic matches the direct rank formula on random tables") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t N = 5 + uniform_index(rng, 26);  // up to 30 blocks
        const std::size_t k = 2 + uniform_index(rng, 4);   // up to 5 treatments
        std::vector<std::vector<double>> table(N, std::vector<double>(k));
        for (auto& row : table)
            for (auto& v : row) v = uniform_range(rng, -1.0, 1.0);

        // direct evaluation: classic statistic with the tie-correction factor
        std::vector<double> R(k, 0.0);
        double tie_sum = 0.0;
        for (const auto& row : table) {
            auto ranks = rank_desc_with_ties(row);
            for (std::size_t j = 0; j < k; ++j) R[j] += ranks[j];
            std::vector<double> sorted(row);
            std::sort(sorted.begin(), sorted.end());
            std::size_t i = 0;
            while (i < k) {
                std::size_t j = i;
                while (j + 1 < k && sorted[j + 1] == sorted[i]) ++j;
                const double t = static_cast<double>(j - i + 1);
                tie_sum += t * t * t - t;
                i = j + 1;
            }
        }
        const double Nd = static_cast<double>(N), kd = static_cast<double>(k);
        double sumR2 = 0.0;
        for (double v : R) sumR2 += v * v;
        const double uncorrected = 12.0 / (Nd * kd * (kd + 1.0)) * sumR2 - 3.0 * Nd * (kd + 1.0);
        const double correction = 1.0 - tie_sum / (Nd * kd * (kd * kd - 1.0));
        const double expected = correction > 0 ? uncorrected / correction : 0.0;

        auto r = friedman_test(table);
        CHECK(r.statistic == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("wilcoxon signed-rank exact values") {
    CHECK(wilcoxon_signed_rank({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}) == doctest::Approx(0.25));
    CHECK(wilcoxon_signed_rank({1.0, -2.0, 3.0}, {0.0, 0.0, 0.0}) == doctest::Approx(0.75));
    CHECK(wilcoxon_signed_rank({1.5, -0.5, 2.5, 3.0, -1.0}, {0.0, 0.0, 0.0, 0.0, 0.0}) ==
          doctest::Approx(0.3125));

    // uniform dominance over 30 paired repetitions
    std::vector<double> a(30, 0.9), b(30, 0.7);
    CHECK(wilcoxon_signed_rank(a, b) == doctest::Approx(2.0 / (1u << 30)).epsilon(1e-9));

    // all-zero differences: no evidence
    CHECK(wilcoxon_signed_rank(a, a) == 1.0);
    CHECK_THROWS_AS(wilcoxon_signed_rank({1.0}, {1.0, 2.0}), ArgumentError);
}

TEST_CASE("wilcoxon p-values stay within [0,1] and detect shifts") {
    Rng rng(15);
    std::vector<double> base(20), shifted(20);
    for (std::size_t i = 0; i < 20; ++i) {
        base[i] = uniform_range(rng, 0.0, 1.0);
        shifted[i] = base[i] + 0.3 + 0.05 * uniform01(rng);
    }
    const double p = wilcoxon_signed_rank(shifted, base);
    CHECK(p > 0.0);
    CHECK(p < 0.001);
    // symmetric in argument order
    CHECK(wilcoxon_signed_rank(base, shifted) == doctest::Approx(p));
}

TEST_CASE("holm adjustment") {
    auto adj = holm_adjust({0.01, 0.04, 0.03, 0.005});
    // sorted: 0.005*4=0.02, 0.01*3=0.03, 0.03*2=0.06, 0.04*1=0.04 -> cummax 0.06
    CHECK(adj[3] == doctest::Approx(0.02));
    CHECK(adj[0] == doctest::Approx(0.03));
    CHECK(adj[2] == doctest::Approx(0.06));
    CHECK(adj[1] == doctest::Approx(0.06));  // monotonicity enforced

    auto one = holm_adjust({0.2});
    CHECK(one[0] == doctest::Approx(0.2));
    CHECK(holm_adjust({}).empty());

    auto capped = holm_adjust({0.9, 0.8});
    CHECK(capped[0] <= 1.0);
    CHECK(capped[1] <= 1.0);
}
