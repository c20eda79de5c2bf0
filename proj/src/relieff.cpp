#include <algorithm>
#include <cmath>
#include <numeric>

#include "voxsel/selection.hpp"

namespace voxsel {

RankingResult rank_relieff(const Eigen::MatrixXd& X, const std::vector<int>& y, int k, int m,
                           std::uint64_t rng_seed) {
    const auto n = X.rows();
    const auto F = X.cols();
    if (static_cast<std::size_t>(n) != y.size())
        throw ArgumentError("rank_relieff: X rows != y length");
    if (k < 1) throw ArgumentError("rank_relieff: k must be >= 1");

    std::ptrdiff_t class_count[2] = {0, 0};
    for (int v : y) ++class_count[v];
    for (int c = 0; c < 2; ++c)
        if (class_count[c] <= k)
            throw ArgumentError("rank_relieff: class " + std::to_string(c) +
                                " has <= k members (k=" + std::to_string(k) + ")");

    // per-feature diff normalization by observed range
    Eigen::VectorXd lo = X.colwise().minCoeff();
    Eigen::VectorXd range = (X.colwise().maxCoeff().transpose() - lo).cwiseMax(0.0);
    Eigen::VectorXd inv_range(F);
    for (Eigen::Index f = 0; f < F; ++f)
        inv_range[f] = range[f] > 0.0 ? 1.0 / range[f] : 0.0;

    // anchors: all samples once by default, otherwise a seeded subsample
    std::vector<std::size_t> anchors;
    if (m < 0 || m >= static_cast<int>(n)) {
        anchors.resize(static_cast<std::size_t>(n));
        std::iota(anchors.begin(), anchors.end(), std::size_t{0});
    } else {
        if (m == 0) throw ArgumentError("rank_relieff: m must be positive");
        Rng rng(rng_seed);
        anchors = sample_without_replacement(static_cast<std::size_t>(n),
                                             static_cast<std::size_t>(m), rng);
    }
    const double m_used = static_cast<double>(anchors.size());

    const double prior[2] = {static_cast<double>(class_count[0]) / static_cast<double>(n),
                             static_cast<double>(class_count[1]) / static_cast<double>(n)};

    Eigen::VectorXd weights = Eigen::VectorXd::Zero(F);
    std::vector<std::pair<double, Eigen::Index>> dist_hit, dist_miss;
    for (std::size_t ai = 0; ai < anchors.size(); ++ai) {
        const auto a = static_cast<Eigen::Index>(anchors[ai]);
        dist_hit.clear();
        dist_miss.clear();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == a) continue;
            const double dist = (X.row(j) - X.row(a)).cwiseAbs().sum();
            if (y[static_cast<std::size_t>(j)] == y[static_cast<std::size_t>(a)])
                dist_hit.emplace_back(dist, j);
            else
                dist_miss.emplace_back(dist, j);
        }
        auto by_dist_then_index = [](const auto& p, const auto& q) {
            if (p.first != q.first) return p.first < q.first;
            return p.second < q.second;
        };
        std::partial_sort(dist_hit.begin(), dist_hit.begin() + k, dist_hit.end(),
                          by_dist_then_index);
        std::partial_sort(dist_miss.begin(), dist_miss.begin() + k, dist_miss.end(),
                          by_dist_then_index);

        const int own = y[static_cast<std::size_t>(a)];
        const double miss_weight = prior[1 - own] / (1.0 - prior[own]);  // = 1 for two classes
        for (int t = 0; t < k; ++t) {
            const Eigen::Index h = dist_hit[static_cast<std::size_t>(t)].second;
            const Eigen::Index mi = dist_miss[static_cast<std::size_t>(t)].second;
            weights -= ((X.row(h) - X.row(a)).cwiseAbs().transpose().cwiseProduct(inv_range)) /
                       (m_used * k);
            weights += miss_weight *
                       ((X.row(mi) - X.row(a)).cwiseAbs().transpose().cwiseProduct(inv_range)) /
                       (m_used * k);
        }
    }

    RankingResult r;
    r.method = SelectionMethod::ReliefF;
    r.params["k"] = k;
    r.params["m"] = static_cast<double>(anchors.size());
    r.scores.assign(weights.data(), weights.data() + F);
    r.order = detail::order_by_score(r.scores);
    return r;
}

}  // namespace voxsel
