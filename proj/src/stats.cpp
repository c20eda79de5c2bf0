#include "voxsel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace voxsel {

std::vector<double> rank_desc_with_ties(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

// Regularized incomplete gamma functions (series / continued fraction).
double gamma_p_series(double a, double x) {
    double sum = 1.0 / a, term = sum, ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi2_survival(double x, int df) {
    if (df < 1) throw ArgumentError("chi2_survival: df must be >= 1");
    if (x <= 0.0) return 1.0;
    const double a = df / 2.0, half = x / 2.0;
    if (half < a + 1.0) return 1.0 - gamma_p_series(a, half);
    return gamma_q_contfrac(a, half);
}

FriedmanResult friedman_test(const std::vector<std::vector<double>>& blocks) {
    const std::size_t N = blocks.size();
    if (N < 2) throw ArgumentError("friedman_test: need at least 2 blocks");
    const std::size_t k = blocks[0].size();
    if (k < 2) throw ArgumentError("friedman_test: need at least 2 treatments");
    for (const auto& b : blocks)
        if (b.size() != k) throw ArgumentError("friedman_test: ragged score table");

    std::vector<double> rank_sum(k, 0.0);
    double sum_r2 = 0.0;
    for (const auto& block : blocks) {
        auto ranks = rank_desc_with_ties(block);
        for (std::size_t j = 0; j < k; ++j) {
            rank_sum[j] += ranks[j];
            sum_r2 += ranks[j] * ranks[j];
        }
    }

    FriedmanResult out;
    out.mean_ranks.resize(k);
    for (std::size_t j = 0; j < k; ++j)
        out.mean_ranks[j] = rank_sum[j] / static_cast<double>(N);

    // Conover's tie-robust form:
    //   chi2 = (k-1) * [sum_j R_j^2 - N^2 k (k+1)^2 / 4] / [sum_ij r_ij^2 - N k (k+1)^2 / 4]
    const double Nd = static_cast<double>(N), kd = static_cast<double>(k);
    double S = 0.0;
    for (std::size_t j = 0; j < k; ++j) S += rank_sum[j] * rank_sum[j];
    const double numer = (kd - 1.0) * (S - Nd * Nd * kd * (kd + 1.0) * (kd + 1.0) / 4.0);
    const double denom = sum_r2 - Nd * kd * (kd + 1.0) * (kd + 1.0) / 4.0;
    if (denom <= 0.0) {  // every block fully tied
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    out.statistic = numer / denom;
    out.p_value = chi2_survival(out.statistic, static_cast<int>(k) - 1);
    return out;
}

double wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ArgumentError("wilcoxon: paired samples differ in length");
    std::vector<double> diff;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diff.push_back(d);
    }
    const std::size_t n = diff.size();
    if (n == 0) return 1.0;

    std::vector<double> abs_d(n);
    for (std::size_t i = 0; i < n; ++i) abs_d[i] = -std::abs(diff[i]);  // negate: rank 1 = smallest
    auto ranks = rank_desc_with_ties(abs_d);

    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (diff[i] > 0.0) w_plus += ranks[i];
    const double total = static_cast<double>(n) * (n + 1) / 2.0;
    const double w_minus = total - w_plus;
    const double w_small = std::min(w_plus, w_minus);

    if (n <= 50) {
        // exact: DP over doubled ranks (average ties make half-integers)
        std::vector<long long> r2(n);
        long long max_sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            r2[i] = std::llround(2.0 * ranks[i]);
            max_sum += r2[i];
        }
        std::vector<double> count(static_cast<std::size_t>(max_sum) + 1, 0.0);
        count[0] = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            for (long long s = max_sum; s >= r2[i]; --s)
                count[static_cast<std::size_t>(s)] +=
                    count[static_cast<std::size_t>(s - r2[i])];
        const long long w2 = std::llround(2.0 * w_small);
        double cum = 0.0;
        for (long long s = 0; s <= std::min(w2, max_sum); ++s)
            cum += count[static_cast<std::size_t>(s)];
        const double p = 2.0 * cum / std::pow(2.0, static_cast<double>(n));
        return std::min(1.0, p);
    }

    // normal approximation with tie correction and continuity correction
    const double nd = static_cast<double>(n);
    double tie_term = 0.0;
    {
        std::vector<double> sorted(abs_d);
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double mean = nd * (nd + 1.0) / 4.0;
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) return 1.0;
    const double z = (w_small - mean + 0.5) / std::sqrt(var);
    const double p = 2.0 * 0.5 * std::erfc(-z / std::sqrt(2.0));
    return std::min(1.0, p);
}

std::vector<double> holm_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> adjusted(m, 0.0);
    double running = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        const double scaled = static_cast<double>(m - r) * p_values[idx[r]];
        running = std::max(running, std::min(1.0, scaled));
        adjusted[idx[r]] = running;
    }
    return adjusted;
}

}  // namespace voxsel
