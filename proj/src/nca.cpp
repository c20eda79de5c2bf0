#include <cmath>

#include "voxsel/selection.hpp"

namespace voxsel {

namespace detail {

// Leave-one-out soft-neighbor objective with diagonal weighting:
//   d_w(i,j) = sum_f w_f^2 |x_if - x_jf|
//   p_ij ∝ exp(-d_w(i,j)/sigma), p_ii = 0
//   F(w) = (1/n) sum_i sum_{j: y_j = y_i} p_ij - lambda sum_f w_f^2
NcaEval nca_objective(const Eigen::MatrixXd& X, const std::vector<int>& y,
                      const Eigen::VectorXd& w, double lambda, double sigma, bool want_grad) {
    const auto n = X.rows();
    const auto F = X.cols();
    const Eigen::VectorXd w2 = w.array().square();

    NcaEval out;
    out.objective = 0.0;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(want_grad ? F : 0);

    Eigen::MatrixXd D(n, F);       // |x_i - x_k| rows for one anchor
    Eigen::VectorXd dw(n), p(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        D = (X.rowwise() - X.row(i)).cwiseAbs();
        dw = D * w2;
        double dmin = std::numeric_limits<double>::infinity();
        for (Eigen::Index k2 = 0; k2 < n; ++k2)
            if (k2 != i) dmin = std::min(dmin, dw[k2]);
        for (Eigen::Index k2 = 0; k2 < n; ++k2)
            p[k2] = (k2 == i) ? 0.0 : std::exp(-(dw[k2] - dmin) / sigma);
        const double z = p.sum();
        if (!(z > 0.0) || !std::isfinite(z))
            throw TrainingFailure("nca: degenerate soft-neighbor normalization");
        p /= z;

        double p_hit = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i && y[static_cast<std::size_t>(j)] == y[static_cast<std::size_t>(i)])
                p_hit += p[j];
        out.objective += p_hit;

        if (want_grad) {
            Eigen::VectorXd p_all_D = D.transpose() * p;  // sum_k p_ik |x_i - x_k|
            Eigen::VectorXd p_hit_D = Eigen::VectorXd::Zero(F);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j != i && y[static_cast<std::size_t>(j)] == y[static_cast<std::size_t>(i)] &&
                    p[j] > 0.0)
                    p_hit_D += p[j] * D.row(j).transpose();
            }
            acc += p_hit * p_all_D - p_hit_D;
        }
    }

    const double nn = static_cast<double>(n);
    out.objective = out.objective / nn - lambda * w2.sum();
    if (want_grad) {
        out.grad = (2.0 / (nn * sigma)) * w.cwiseProduct(acc) - 2.0 * lambda * w;
        if (!out.grad.allFinite()) throw TrainingFailure("nca: non-finite gradient");
    }
    if (!std::isfinite(out.objective))
        throw TrainingFailure("nca: non-finite objective");
    return out;
}

}  // namespace detail

RankingResult rank_nca(const Eigen::MatrixXd& X, const std::vector<int>& y,
                       const NcaOptions& opts) {
    const auto n = X.rows();
    if (n < 2) throw ArgumentError("rank_nca: need at least 2 samples");
    if (static_cast<std::size_t>(n) != y.size())
        throw ArgumentError("rank_nca: X rows != y length");

    const double lambda = opts.lambda >= 0.0 ? opts.lambda : 1.0 / static_cast<double>(n);

    Eigen::VectorXd w = Eigen::VectorXd::Ones(X.cols());
    detail::NcaEval cur = detail::nca_objective(X, y, w, lambda, opts.sigma, true);

    double step = opts.initial_step;
    for (int it = 0; it < opts.max_iters && step >= opts.min_step; ++it) {
        Eigen::VectorXd w_try = w + step * cur.grad;
        detail::NcaEval trial = detail::nca_objective(X, y, w_try, lambda, opts.sigma, false);
        if (trial.objective > cur.objective) {
            w = std::move(w_try);
            cur = detail::nca_objective(X, y, w, lambda, opts.sigma, true);
        } else {
            step *= 0.5;
        }
    }

    RankingResult r;
    r.method = SelectionMethod::Nca;
    r.params["lambda"] = lambda;
    r.params["sigma"] = opts.sigma;
    r.params["max_iters"] = opts.max_iters;
    r.scores.resize(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index f = 0; f < X.cols(); ++f)
        r.scores[static_cast<std::size_t>(f)] = w[f] * w[f];
    r.order = detail::order_by_score(r.scores);
    return r;
}

}  // namespace voxsel
