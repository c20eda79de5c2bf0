#pragma once

#include <string>
#include <vector>

#include "voxsel/common.hpp"

namespace voxsel {

// Average ranks (1 = largest value) of one block of scores, ties averaged.
std::vector<double> rank_desc_with_ties(const std::vector<double>& values);

// Upper tail of the chi-squared distribution with `df` degrees of freedom.
double chi2_survival(double x, int df);

struct FriedmanResult {
    double statistic = 0.0;   // tie-corrected chi-squared statistic
    double p_value = 1.0;
    std::vector<double> mean_ranks;  // per treatment, rank 1 = best (largest score)
};

// Friedman test on a blocks x treatments score table (blocks = repetitions).
FriedmanResult friedman_test(const std::vector<std::vector<double>>& blocks);

// Two-sided Wilcoxon signed-rank test on paired samples; zero differences are
// dropped. Exact null distribution up to n = 50, normal approximation beyond.
double wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

// Holm step-down adjustment; preserves input order.
std::vector<double> holm_adjust(const std::vector<double>& p_values);

}  // namespace voxsel
