#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "voxsel/metrics.hpp"
#include "voxsel/selection.hpp"
#include "voxsel/splits.hpp"

namespace voxsel {

namespace {

// Pairwise |Pearson| cache over columns of X plus the label vector.
class CorrelationCache {
  public:
    CorrelationCache(const Eigen::MatrixXd& X, const std::vector<int>& y) : X_(X) {
        y_.resize(static_cast<Eigen::Index>(y.size()));
        for (std::size_t i = 0; i < y.size(); ++i) y_[static_cast<Eigen::Index>(i)] = y[i];
        rcf_.resize(static_cast<std::size_t>(X.cols()));
        for (Eigen::Index f = 0; f < X.cols(); ++f)
            rcf_[static_cast<std::size_t>(f)] = std::abs(detail::pearson(X.col(f), y_));
    }

    double feature_class(int f) const { return rcf_[static_cast<std::size_t>(f)]; }

    double feature_feature(int a, int b) {
        if (a == b) return 1.0;
        const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        auto it = rff_.find(key);
        if (it != rff_.end()) return it->second;
        const double v = std::abs(detail::pearson(X_.col(key.first), X_.col(key.second)));
        rff_[key] = v;
        return v;
    }

  private:
    const Eigen::MatrixXd& X_;
    Eigen::VectorXd y_;
    std::vector<double> rcf_;
    std::map<std::pair<int, int>, double> rff_;
};

double cfs_merit(const std::vector<int>& subset, CorrelationCache& corr) {
    const auto k = static_cast<double>(subset.size());
    double sum_cf = 0.0;
    for (int f : subset) sum_cf += corr.feature_class(f);
    const double mean_cf = sum_cf / k;
    double mean_ff = 0.0;
    if (subset.size() > 1) {
        double sum_ff = 0.0;
        for (std::size_t i = 0; i < subset.size(); ++i)
            for (std::size_t j = i + 1; j < subset.size(); ++j)
                sum_ff += corr.feature_feature(subset[i], subset[j]);
        mean_ff = sum_ff / (k * (k - 1.0) / 2.0);
    }
    const double denom = std::sqrt(k + k * (k - 1.0) * mean_ff);
    if (denom == 0.0) return 0.0;
    return k * mean_cf / denom;
}

}  // namespace

SubsetResult select_cfs(const Eigen::MatrixXd& X, const std::vector<int>& y, int max_stale) {
    const auto F = static_cast<int>(X.cols());
    if (F < 1) throw ArgumentError("select_cfs: need at least one feature");
    if (max_stale < 1) throw ArgumentError("select_cfs: max_stale must be >= 1");
    CorrelationCache corr(X, y);

    // best-first forward search; priority by merit, deterministic tie order
    struct Node {
        double merit;
        std::vector<int> subset;  // sorted
        bool operator<(const Node& o) const {
            if (merit != o.merit) return merit < o.merit;
            if (subset.size() != o.subset.size()) return subset.size() > o.subset.size();
            return subset > o.subset;  // lexicographically smaller wins
        }
    };
    std::priority_queue<Node> open;
    std::set<std::vector<int>> visited;

    SubsetResult result;
    result.method = SelectionMethod::Cfs;
    double best_merit = -1.0;
    int stale = 0;

    open.push(Node{0.0, {}});
    visited.insert({});
    while (!open.empty() && stale < max_stale) {
        Node node = open.top();
        open.pop();
        bool improved = false;
        for (int f = 0; f < F; ++f) {
            if (std::binary_search(node.subset.begin(), node.subset.end(), f)) continue;
            std::vector<int> child = node.subset;
            child.insert(std::lower_bound(child.begin(), child.end(), f), f);
            if (!visited.insert(child).second) continue;
            const double merit = cfs_merit(child, corr);
            if (merit > best_merit + 1e-12) {
                best_merit = merit;
                result.selected = child;
                result.criterion_trace.emplace_back(static_cast<int>(child.size()), merit);
                improved = true;
            }
            open.push(Node{merit, std::move(child)});
        }
        stale = improved ? 0 : stale + 1;
    }
    return result;
}

SubsetResult select_sfs(const Dataset& d, const std::vector<std::size_t>& rows,
                        const SfsOptions& opts) {
    if (opts.cap < 1 || opts.cap > 50)
        throw ArgumentError("select_sfs: cap must be in [1, 50]");
    if (rows.empty()) throw ArgumentError("select_sfs: row set must be non-empty");

    // internal person-grouped split of `rows`
    Dataset inner;
    inner.features = rows_of(d.features, rows);
    inner.labels = labels_of(d, rows);
    inner.group_of = d.group_of;
    inner.column_names = d.column_names;
    for (std::size_t r : rows) inner.subject_ids.push_back(d.subject_ids[r]);

    SplitPlan plan = stratified_holdout_by_person(inner, opts.train_fraction, 0,
                                                  seed_combine(opts.rng_seed, 0x5f5f));
    Standardizer std_ = fit_standardizer(inner, plan.train_rows);
    Eigen::MatrixXd Xtr = apply_standardizer(std_, inner, plan.train_rows);
    Eigen::MatrixXd Xte = apply_standardizer(std_, inner, plan.test_rows);
    std::vector<int> ytr = labels_of(inner, plan.train_rows);
    std::vector<int> yte = labels_of(inner, plan.test_rows);
    Eigen::VectorXd ytr_v(static_cast<Eigen::Index>(ytr.size()));
    for (std::size_t i = 0; i < ytr.size(); ++i) ytr_v[static_cast<Eigen::Index>(i)] = ytr[i];

    auto score_subset = [&](const std::vector<int>& subset, std::uint64_t seed) -> double {
        TrainConfig cfg = opts.wrapper;
        cfg.rng_seed = seed;
        try {
            TrainedNetwork t = train(columns_of(Xtr, subset), ytr_v, cfg);
            Eigen::VectorXd o = forward(t.params, columns_of(Xte, subset));
            std::vector<int> pred(static_cast<std::size_t>(o.size()));
            for (Eigen::Index i = 0; i < o.size(); ++i)
                pred[static_cast<std::size_t>(i)] = o[i] >= 0.5 ? 1 : 0;
            return macro_f1(yte, pred);
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    SubsetResult result;
    result.method = SelectionMethod::Sfs;
    std::vector<int> current;
    double best_score = -std::numeric_limits<double>::infinity();
    const auto F = static_cast<int>(d.n_features());

    while (static_cast<int>(current.size()) < opts.cap) {
        int best_f = -1;
        double best_trial = best_score;
        for (int f = 0; f < F; ++f) {
            if (std::binary_search(current.begin(), current.end(), f)) continue;
            std::vector<int> trial = current;
            trial.insert(std::lower_bound(trial.begin(), trial.end(), f), f);
            // candidate-independent seed keeps the comparison fair
            const double s = score_subset(
                trial, seed_combine(opts.rng_seed, static_cast<std::uint64_t>(current.size())));
            if (s > best_trial) {
                best_trial = s;
                best_f = f;
            }
        }
        if (best_f < 0) break;  // no candidate improves
        current.insert(std::lower_bound(current.begin(), current.end(), best_f), best_f);
        best_score = best_trial;
        result.criterion_trace.emplace_back(static_cast<int>(current.size()), best_score);
    }
    if (current.empty()) {
        // fall back to the single best candidate even if it never beat -inf..0 baseline
        int best_f = 0;
        double best_trial = -std::numeric_limits<double>::infinity();
        for (int f = 0; f < F; ++f) {
            const double s = score_subset({f}, seed_combine(opts.rng_seed, 0));
            if (s > best_trial) {
                best_trial = s;
                best_f = f;
            }
        }
        current = {best_f};
        result.criterion_trace.emplace_back(1, best_trial);
    }
    result.selected = std::move(current);
    return result;
}

}  // namespace voxsel
