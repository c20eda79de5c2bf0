#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "voxsel/selection.hpp"

namespace voxsel {

std::string to_string(SelectionMethod m) {
    switch (m) {
        case SelectionMethod::Baseline: return "baseline";
        case SelectionMethod::Chi2: return "chi2";
        case SelectionMethod::Pcc: return "pcc";
        case SelectionMethod::Tvfs: return "tvfs";
        case SelectionMethod::ReliefF: return "relieff";
        case SelectionMethod::Mrmr: return "mrmr";
        case SelectionMethod::Nca: return "nca";
        case SelectionMethod::Cfs: return "cfs";
        case SelectionMethod::Sfs: return "sfs";
    }
    return "?";
}

SelectionMethod selection_method_from_string(const std::string& s) {
    for (auto m : {SelectionMethod::Baseline, SelectionMethod::Chi2, SelectionMethod::Pcc,
                   SelectionMethod::Tvfs, SelectionMethod::ReliefF, SelectionMethod::Mrmr,
                   SelectionMethod::Nca, SelectionMethod::Cfs, SelectionMethod::Sfs})
        if (to_string(m) == s) return m;
    throw ArgumentError("unknown selection method: " + s);
}

namespace detail {

std::vector<int> order_by_score(const std::vector<double>& scores) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)])
            return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
        return a < b;
    });
    return order;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const auto n = static_cast<double>(a.size());
    const double ma = a.mean(), mb = b.mean();
    const Eigen::ArrayXd da = a.array() - ma, db = b.array() - mb;
    const double sa = std::sqrt(da.square().sum() / n);
    const double sb = std::sqrt(db.square().sum() / n);
    if (sa == 0.0 || sb == 0.0) return 0.0;
    return (da * db).sum() / n / (sa * sb);
}

std::vector<int> equal_width_codes(const Eigen::VectorXd& col, int bins) {
    const double lo = col.minCoeff(), hi = col.maxCoeff();
    std::vector<int> codes(static_cast<std::size_t>(col.size()), 0);
    if (hi <= lo) return codes;
    const double width = (hi - lo) / bins;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        int b = static_cast<int>((col[i] - lo) / width);
        codes[static_cast<std::size_t>(i)] = std::clamp(b, 0, bins - 1);
    }
    return codes;
}

double mutual_information(const std::vector<int>& a, int a_card, const std::vector<int>& b,
                          int b_card) {
    if (a.size() != b.size()) throw ArgumentError("mutual_information: length mismatch");
    const auto n = static_cast<double>(a.size());
    std::vector<double> joint(static_cast<std::size_t>(a_card) * b_card, 0.0);
    std::vector<double> pa(static_cast<std::size_t>(a_card), 0.0);
    std::vector<double> pb(static_cast<std::size_t>(b_card), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[static_cast<std::size_t>(a[i]) * b_card + b[i]] += 1.0;
        pa[static_cast<std::size_t>(a[i])] += 1.0;
        pb[static_cast<std::size_t>(b[i])] += 1.0;
    }
    double mi = 0.0;
    for (int i = 0; i < a_card; ++i) {
        for (int j = 0; j < b_card; ++j) {
            const double pij = joint[static_cast<std::size_t>(i) * b_card + j] / n;
            if (pij == 0.0) continue;
            mi += pij * std::log2(pij / ((pa[static_cast<std::size_t>(i)] / n) *
                                         (pb[static_cast<std::size_t>(j)] / n)));
        }
    }
    return std::max(0.0, mi);
}

namespace {

// Equal-frequency bin codes via order statistics; ties collapse bins.
std::vector<int> equal_frequency_codes(const Eigen::VectorXd& col, int bins) {
    const auto n = col.size();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return col[a] < col[b]; });

    // cut points at quantile boundaries; identical values share a bin
    std::vector<int> codes(static_cast<std::size_t>(n), 0);
    int bin = 0;
    double upper = col[idx[0]];
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const int target = std::min(bins - 1, static_cast<int>((r * static_cast<std::size_t>(bins)) /
                                                               idx.size()));
        if (target > bin && col[idx[r]] > upper) bin = target;
        codes[static_cast<std::size_t>(idx[r])] = bin;
        upper = std::max(upper, col[idx[r]]);
    }
    return codes;
}

}  // namespace
}  // namespace detail

RankingResult rank_chi2(const Eigen::MatrixXd& X, const std::vector<int>& y, int bins) {
    if (bins < 2) throw ArgumentError("rank_chi2: bins must be >= 2");
    if (X.rows() < bins) throw ArgumentError("rank_chi2: need at least `bins` samples");
    if (static_cast<std::size_t>(X.rows()) != y.size())
        throw ArgumentError("rank_chi2: X rows != y length");

    const auto n = X.rows();
    RankingResult r;
    r.method = SelectionMethod::Chi2;
    r.params["bins"] = bins;
    r.scores.resize(static_cast<std::size_t>(X.cols()), 0.0);

    double class_count[2] = {0.0, 0.0};
    for (int v : y) class_count[v] += 1.0;

    for (Eigen::Index f = 0; f < X.cols(); ++f) {
        auto codes = detail::equal_frequency_codes(X.col(f), bins);
        std::vector<double> observed(static_cast<std::size_t>(bins) * 2, 0.0);
        std::vector<double> bin_count(static_cast<std::size_t>(bins), 0.0);
        for (Eigen::Index i = 0; i < n; ++i) {
            observed[static_cast<std::size_t>(codes[static_cast<std::size_t>(i)]) * 2 +
                     y[static_cast<std::size_t>(i)]] += 1.0;
            bin_count[static_cast<std::size_t>(codes[static_cast<std::size_t>(i)])] += 1.0;
        }
        double stat = 0.0;
        for (int b = 0; b < bins; ++b) {
            for (int c = 0; c < 2; ++c) {
                const double expected =
                    bin_count[static_cast<std::size_t>(b)] * class_count[c] / static_cast<double>(n);
                if (expected == 0.0) continue;
                const double o = observed[static_cast<std::size_t>(b) * 2 + c];
                stat += (o - expected) * (o - expected) / expected;
            }
        }
        r.scores[static_cast<std::size_t>(f)] = stat;
    }
    r.order = detail::order_by_score(r.scores);
    return r;
}

RankingResult rank_pcc(const Eigen::MatrixXd& X, const std::vector<int>& y) {
    if (X.rows() < 2) throw ArgumentError("rank_pcc: need at least 2 samples");
    if (static_cast<std::size_t>(X.rows()) != y.size())
        throw ArgumentError("rank_pcc: X rows != y length");
    Eigen::VectorXd yv(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) yv[static_cast<Eigen::Index>(i)] = y[i];

    RankingResult r;
    r.method = SelectionMethod::Pcc;
    r.scores.resize(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index f = 0; f < X.cols(); ++f)
        r.scores[static_cast<std::size_t>(f)] = std::abs(detail::pearson(X.col(f), yv));
    r.order = detail::order_by_score(r.scores);
    return r;
}

RankingResult rank_tvfs(const Eigen::MatrixXd& X_raw) {
    RankingResult r;
    r.method = SelectionMethod::Tvfs;
    r.scores.resize(static_cast<std::size_t>(X_raw.cols()));
    const auto n = static_cast<double>(X_raw.rows());
    for (Eigen::Index f = 0; f < X_raw.cols(); ++f) {
        const double mean = X_raw.col(f).mean();
        r.scores[static_cast<std::size_t>(f)] = (X_raw.col(f).array() - mean).square().sum() / n;
    }
    r.order = detail::order_by_score(r.scores);
    return r;
}

RankingResult rank_mrmr(const Eigen::MatrixXd& X, const std::vector<int>& y, int top, int bins) {
    const auto F = X.cols();
    if (top < 1 || top > F) throw ArgumentError("rank_mrmr: top must be in [1, n_features]");
    if (bins < 2) throw ArgumentError("rank_mrmr: bins must be >= 2");
    if (static_cast<std::size_t>(X.rows()) != y.size())
        throw ArgumentError("rank_mrmr: X rows != y length");

    std::vector<std::vector<int>> codes(static_cast<std::size_t>(F));
    for (Eigen::Index f = 0; f < F; ++f)
        codes[static_cast<std::size_t>(f)] = detail::equal_width_codes(X.col(f), bins);

    std::vector<double> relevance(static_cast<std::size_t>(F));
    for (Eigen::Index f = 0; f < F; ++f)
        relevance[static_cast<std::size_t>(f)] =
            detail::mutual_information(codes[static_cast<std::size_t>(f)], bins, y, 2);

    RankingResult r;
    r.method = SelectionMethod::Mrmr;
    r.params["top"] = top;
    r.params["bins"] = bins;
    r.scores.resize(static_cast<std::size_t>(F), 0.0);

    std::vector<char> picked(static_cast<std::size_t>(F), 0);
    std::vector<double> redundancy_sum(static_cast<std::size_t>(F), 0.0);
    // pairwise MI cache grows one row per pick
    for (int step = 0; step < top; ++step) {
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int f = 0; f < F; ++f) {
            if (picked[static_cast<std::size_t>(f)]) continue;
            const double score =
                step == 0 ? relevance[static_cast<std::size_t>(f)]
                          : relevance[static_cast<std::size_t>(f)] -
                                redundancy_sum[static_cast<std::size_t>(f)] / step;
            if (score > best_score) {
                best_score = score;
                best = f;
            }
        }
        picked[static_cast<std::size_t>(best)] = 1;
        r.order.push_back(best);
        r.scores[static_cast<std::size_t>(best)] = best_score;
        if (step + 1 < top) {
            for (int f = 0; f < F; ++f) {
                if (picked[static_cast<std::size_t>(f)]) continue;
                redundancy_sum[static_cast<std::size_t>(f)] += detail::mutual_information(
                    codes[static_cast<std::size_t>(f)], bins,
                    codes[static_cast<std::size_t>(best)], bins);
            }
        }
    }
    // tail: remaining features by raw relevance
    std::vector<int> rest;
    for (int f = 0; f < F; ++f)
        if (!picked[static_cast<std::size_t>(f)]) rest.push_back(f);
    std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
        if (relevance[static_cast<std::size_t>(a)] != relevance[static_cast<std::size_t>(b)])
            return relevance[static_cast<std::size_t>(a)] > relevance[static_cast<std::size_t>(b)];
        return a < b;
    });
    for (int f : rest) {
        r.order.push_back(f);
        r.scores[static_cast<std::size_t>(f)] = relevance[static_cast<std::size_t>(f)];
    }
    return r;
}

std::vector<int> top_k(const RankingResult& r, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > r.order.size())
        throw ArgumentError("top_k: k must be in [1, n_features], got " + std::to_string(k));
    return {r.order.begin(), r.order.begin() + k};
}

std::string ranking_to_json(const RankingResult& r) {
    nlohmann::json j;
    j["method"] = to_string(r.method);
    j["params"] = r.params;
    j["order"] = r.order;
    j["scores"] = r.scores;
    return j.dump();
}

std::string subset_to_json(const SubsetResult& r) {
    nlohmann::json j;
    j["method"] = to_string(r.method);
    j["selected"] = r.selected;
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& [size, value] : r.criterion_trace) trace.push_back({size, value});
    j["criterion_trace"] = trace;
    return j.dump();
}

}  // namespace voxsel
