#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "voxsel/dataset.hpp"
#include "voxsel/training.hpp"

namespace voxsel {

enum class SelectionMethod { Baseline, Chi2, Pcc, Tvfs, ReliefF, Mrmr, Nca, Cfs, Sfs };

std::string to_string(SelectionMethod m);
SelectionMethod selection_method_from_string(const std::string& s);

// A full feature ordering. `order` is the method's ranking (best first);
// `scores` carry the per-feature score the method assigned. Equal scores are
// ordered by ascending feature index.
struct RankingResult {
    SelectionMethod method = SelectionMethod::Pcc;
    std::vector<int> order;
    std::vector<double> scores;
    std::map<std::string, double> params;
};

// Output of the subset selectors (CFS, SFS).
struct SubsetResult {
    SelectionMethod method = SelectionMethod::Cfs;
    std::vector<int> selected;
    std::vector<std::pair<int, double>> criterion_trace;  // (subset size, criterion)
};

// chi-square statistic of the (equal-frequency bin) x (class) contingency
// table per feature. Constant features score 0.
RankingResult rank_chi2(const Eigen::MatrixXd& X, const std::vector<int>& y, int bins = 10);

// |Pearson correlation| with the 0/1 label.
RankingResult rank_pcc(const Eigen::MatrixXd& X, const std::vector<int>& y);

// Population variance; meaningful only on unstandardized values.
RankingResult rank_tvfs(const Eigen::MatrixXd& X_raw);

// Kononenko ReliefF: k nearest hits/misses per anchor under Manhattan
// distance, feature diffs normalized by per-feature (max - min).
RankingResult rank_relieff(const Eigen::MatrixXd& X, const std::vector<int>& y, int k = 10,
                           int m = -1 /* -1: all samples */, std::uint64_t rng_seed = 0);

// Greedy minimum-redundancy/maximum-relevance (difference form) on mutual
// information over equal-width bins; tail beyond `top` appended by relevance.
RankingResult rank_mrmr(const Eigen::MatrixXd& X, const std::vector<int>& y, int top,
                        int bins = 10);

struct NcaOptions {
    double lambda = -1.0;  // < 0: defaults to 1/n_samples
    double sigma = 1.0;
    int max_iters = 100;
    double initial_step = 1.0;
    double min_step = 1e-8;
    std::uint64_t rng_seed = 0;
};

// Diagonal feature-weighting NCA fit by gradient ascent with step halving;
// features ranked by squared weight.
RankingResult rank_nca(const Eigen::MatrixXd& X, const std::vector<int>& y,
                       const NcaOptions& opts = {});

// Correlation-based subset selection: best-first forward search over
// merit(S) = k mean|r_cf| / sqrt(k + k(k-1) mean|r_ff|).
SubsetResult select_cfs(const Eigen::MatrixXd& X, const std::vector<int>& y, int max_stale = 5);

struct SfsOptions {
    TrainConfig wrapper;       // compact evaluation network
    int cap = 50;
    double train_fraction = 0.75;
    std::uint64_t rng_seed = 0;

    SfsOptions() {
        wrapper.algorithm = TrainAlgorithm::LM;
        wrapper.hidden_units = 10;
        wrapper.max_epochs = 100;
    }
};

// Sequential forward selection scored by macro-F1 of the wrapper network on an
// internal person-grouped 75/25 split of `rows`.
SubsetResult select_sfs(const Dataset& d, const std::vector<std::size_t>& rows,
                        const SfsOptions& opts = {});

std::vector<int> top_k(const RankingResult& r, int k);

std::string ranking_to_json(const RankingResult& r);
std::string subset_to_json(const SubsetResult& r);

// Shared helpers (exposed for tests).
namespace detail {
// Equal-width discretization into `bins` codes; constant columns map to 0.
std::vector<int> equal_width_codes(const Eigen::VectorXd& col, int bins);
// Mutual information in bits between two code vectors.
double mutual_information(const std::vector<int>& a, int a_card, const std::vector<int>& b,
                          int b_card);
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
// Sort indices by descending score, ties by ascending index.
std::vector<int> order_by_score(const std::vector<double>& scores);

struct NcaEval {
    double objective;
    Eigen::VectorXd grad;
};
// Soft-neighbor NCA objective and (optionally) its gradient at weights w.
NcaEval nca_objective(const Eigen::MatrixXd& X, const std::vector<int>& y,
                      const Eigen::VectorXd& w, double lambda, double sigma, bool want_grad);
}  // namespace detail

}  // namespace voxsel
