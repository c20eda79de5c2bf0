#include "voxsel/training.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "json.hpp"

namespace voxsel {

std::string to_string(TrainAlgorithm a) {
    switch (a) {
        case TrainAlgorithm::LM: return "LM";
        case TrainAlgorithm::RP: return "RP";
        case TrainAlgorithm::BFG: return "BFG";
        case TrainAlgorithm::SCG: return "SCG";
        case TrainAlgorithm::CGB: return "CGB";
        case TrainAlgorithm::CGF: return "CGF";
        case TrainAlgorithm::CGP: return "CGP";
        case TrainAlgorithm::GD: return "GD";
        case TrainAlgorithm::GDX: return "GDX";
        case TrainAlgorithm::GDM: return "GDM";
    }
    return "?";
}

TrainAlgorithm train_algorithm_from_string(const std::string& s) {
    for (auto a : {TrainAlgorithm::LM, TrainAlgorithm::RP, TrainAlgorithm::BFG,
                   TrainAlgorithm::SCG, TrainAlgorithm::CGB, TrainAlgorithm::CGF,
                   TrainAlgorithm::CGP, TrainAlgorithm::GD, TrainAlgorithm::GDX,
                   TrainAlgorithm::GDM})
        if (to_string(a) == s) return a;
    throw ArgumentError("unknown training algorithm: " + s);
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::MaxEpochs: return "max_epochs";
        case StopReason::Goal: return "goal";
        case StopReason::MinGradient: return "min_gradient";
        case StopReason::MuOverflow: return "mu_overflow";
        case StopReason::LineSearchFail: return "line_search_fail";
    }
    return "?";
}

namespace {

// Full-batch objective over fixed (X, y); parameters as a flat vector.
class Objective {
  public:
    Objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Eigen::Index hidden)
        : X_(X), y_(y), hidden_(hidden) {}

    double value(const Eigen::VectorXd& w) const {
        auto p = NetworkParams::unflatten(w, X_.cols(), hidden_);
        Eigen::VectorXd o = forward(p, X_);
        return (o - y_).squaredNorm() / static_cast<double>(X_.rows());
    }

    LossGrad value_and_grad(const Eigen::VectorXd& w) const {
        auto p = NetworkParams::unflatten(w, X_.cols(), hidden_);
        return loss_and_gradient(p, X_, y_);
    }

    Eigen::Index input_dim() const { return X_.cols(); }
    Eigen::Index hidden() const { return hidden_; }

  private:
    const Eigen::MatrixXd& X_;
    const Eigen::VectorXd& y_;
    Eigen::Index hidden_;
};

struct TrainState {
    Eigen::VectorXd w;
    std::vector<double> trace;
    StopReason reason = StopReason::MaxEpochs;
};

void check_finite(const Eigen::VectorXd& w, TrainAlgorithm alg, int epoch) {
    if (!w.allFinite())
        throw TrainingFailure("training aborted: non-finite parameters (" + to_string(alg) +
                              ", epoch " + std::to_string(epoch) + ")");
}

// Common per-epoch bookkeeping; returns true when a stop condition fired.
bool stopped(TrainState& st, const TrainConfig& cfg, double mse, double grad_inf, int epoch) {
    st.trace.push_back(mse);
    if (mse <= cfg.goal_mse) {
        st.reason = StopReason::Goal;
        return true;
    }
    if (grad_inf < cfg.min_gradient) {
        st.reason = StopReason::MinGradient;
        return true;
    }
    if (epoch >= cfg.max_epochs) {
        st.reason = StopReason::MaxEpochs;
        return true;
    }
    return false;
}

TrainState run_gd_family(const Objective& obj, Eigen::VectorXd w, const TrainConfig& cfg) {
    TrainState st;
    const bool use_momentum =
        cfg.algorithm == TrainAlgorithm::GDM || cfg.algorithm == TrainAlgorithm::GDX;
    const bool adaptive = cfg.algorithm == TrainAlgorithm::GDX;
    double lr = cfg.learning_rate;
    Eigen::VectorXd velocity = Eigen::VectorXd::Zero(w.size());

    LossGrad lg = obj.value_and_grad(w);
    for (int epoch = 0;; ++epoch) {
        if (stopped(st, cfg, lg.mse, lg.grad.lpNorm<Eigen::Infinity>(), epoch)) break;

        Eigen::VectorXd w_new;
        Eigen::VectorXd v_new;
        if (use_momentum) {
            v_new = cfg.momentum * velocity - lr * lg.grad;
            w_new = w + v_new;
        } else {
            w_new = w - lr * lg.grad;
        }

        if (adaptive) {
            const double mse_new = obj.value(w_new);
            if (!(mse_new <= cfg.max_perf_increase * lg.mse)) {
                // reject step, shrink rate, drop momentum
                lr *= cfg.lr_decrease;
                velocity.setZero();
                continue;
            }
            if (mse_new < lg.mse) lr *= cfg.lr_increase;
        }
        w = w_new;
        if (use_momentum) velocity = v_new;
        check_finite(w, cfg.algorithm, epoch);
        lg = obj.value_and_grad(w);
    }
    st.w = w;
    return st;
}

TrainState run_rprop(const Objective& obj, Eigen::VectorXd w, const TrainConfig& cfg) {
    TrainState st;
    const Eigen::Index P = w.size();
    Eigen::VectorXd delta = Eigen::VectorXd::Constant(P, cfg.rprop_delta0);
    Eigen::VectorXd prev_grad = Eigen::VectorXd::Zero(P);

    LossGrad lg = obj.value_and_grad(w);
    for (int epoch = 0;; ++epoch) {
        if (stopped(st, cfg, lg.mse, lg.grad.lpNorm<Eigen::Infinity>(), epoch)) break;

        for (Eigen::Index j = 0; j < P; ++j) {
            double g = lg.grad[j];
            const double prod = g * prev_grad[j];
            if (prod > 0.0) {
                delta[j] = std::min(delta[j] * cfg.rprop_eta_plus, cfg.rprop_delta_max);
            } else if (prod < 0.0) {
                delta[j] = std::max(delta[j] * cfg.rprop_eta_minus, cfg.rprop_delta_min);
                g = 0.0;  // iRprop-: forget the sign after a flip
            }
            if (g > 0.0)
                w[j] -= delta[j];
            else if (g < 0.0)
                w[j] += delta[j];
            prev_grad[j] = g;
        }
        check_finite(w, cfg.algorithm, epoch);
        lg = obj.value_and_grad(w);
    }
    st.w = w;
    return st;
}

// Strong-Wolfe line search (bracket + cubic-interpolation zoom).
// Returns accepted step and the evaluation at it, or nullopt on failure.
struct LineSearchResult {
    double alpha;
    double f;
    Eigen::VectorXd grad;
};

std::optional<LineSearchResult> wolfe_line_search(const Objective& obj, const Eigen::VectorXd& w,
                                                  const Eigen::VectorXd& d, double f0,
                                                  const Eigen::VectorXd& g0, double c1, double c2,
                                                  double alpha1) {
    const double d0 = g0.dot(d);
    if (!(d0 < 0.0)) return std::nullopt;  // not a descent direction

    auto eval = [&](double a) {
        LossGrad lg = obj.value_and_grad(w + a * d);
        return std::make_pair(lg.mse, std::move(lg.grad));
    };

    auto cubic_min = [](double a, double fa, double da, double b, double fb, double db) {
        // minimizer of the cubic through (a,fa,da), (b,fb,db); NaN on failure
        const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
        double disc = d1 * d1 - da * db;
        if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
        const double d2 = std::sqrt(disc) * (b > a ? 1.0 : -1.0);
        return b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
    };

    struct Probe {
        double a, f, slope;
        Eigen::VectorXd g;
    };

    auto zoom = [&](Probe lo, Probe hi) -> std::optional<LineSearchResult> {
        for (int it = 0; it < 30; ++it) {
            double a = cubic_min(lo.a, lo.f, lo.slope, hi.a, hi.f, hi.slope);
            const double lo_b = std::min(lo.a, hi.a), hi_b = std::max(lo.a, hi.a);
            const double margin = 0.1 * (hi_b - lo_b);
            if (!std::isfinite(a) || a < lo_b + margin || a > hi_b - margin)
                a = 0.5 * (lo.a + hi.a);
            auto [f, g] = eval(a);
            const double slope = g.dot(d);
            if (f > f0 + c1 * a * d0 || f >= lo.f) {
                hi = Probe{a, f, slope, std::move(g)};
            } else {
                if (std::abs(slope) <= -c2 * d0) return LineSearchResult{a, f, std::move(g)};
                if (slope * (hi.a - lo.a) >= 0.0) hi = lo;
                lo = Probe{a, f, slope, std::move(g)};
            }
            if (std::abs(hi.a - lo.a) < 1e-14) break;
        }
        return std::nullopt;
    };

    double a_prev = 0.0, f_prev = f0, slope_prev = d0;
    Eigen::VectorXd g_prev = g0;
    double a = alpha1;
    const double a_max = 1e6;
    for (int it = 0; it < 20 && a <= a_max; ++it) {
        auto [f, g] = eval(a);
        const double slope = g.dot(d);
        if (f > f0 + c1 * a * d0 || (it > 0 && f >= f_prev))
            return zoom(Probe{a_prev, f_prev, slope_prev, std::move(g_prev)},
                        Probe{a, f, slope, std::move(g)});
        if (std::abs(slope) <= -c2 * d0) return LineSearchResult{a, f, std::move(g)};
        if (slope >= 0.0)
            return zoom(Probe{a, f, slope, std::move(g)},
                        Probe{a_prev, f_prev, slope_prev, std::move(g_prev)});
        a_prev = a;
        f_prev = f;
        slope_prev = slope;
        g_prev = std::move(g);
        a *= 2.0;
    }
    return std::nullopt;
}

TrainState run_cg(const Objective& obj, Eigen::VectorXd w, const TrainConfig& cfg) {
    TrainState st;
    LossGrad lg = obj.value_and_grad(w);
    Eigen::VectorXd g_old = lg.grad;
    Eigen::VectorXd d = -lg.grad;
    double alpha_prev = 0.0;
    bool first = true;

    for (int epoch = 0;; ++epoch) {
        if (stopped(st, cfg, lg.mse, lg.grad.lpNorm<Eigen::Infinity>(), epoch)) break;

        const double alpha1 =
            first ? std::min(1.0, 1.0 / std::max(1e-12, lg.grad.lpNorm<1>()))
                  : std::min(1.0, 1.01 * 2.0 * std::max(1e-16, alpha_prev));
        auto ls = wolfe_line_search(obj, w, d, lg.mse, lg.grad, cfg.wolfe_c1, cfg.wolfe_c2,
                                    alpha1 > 0 ? alpha1 : 1.0);
        if (!ls) {
            // retry once along steepest descent before giving up
            d = -lg.grad;
            ls = wolfe_line_search(obj, w, d, lg.mse, lg.grad, cfg.wolfe_c1, cfg.wolfe_c2, 1.0);
            if (!ls) {
                st.reason = StopReason::LineSearchFail;
                break;
            }
        }
        w += ls->alpha * d;
        check_finite(w, cfg.algorithm, epoch);
        alpha_prev = ls->alpha;

        Eigen::VectorXd g_new = ls->grad;
        double beta = 0.0;
        bool restart = false;
        switch (cfg.algorithm) {
            case TrainAlgorithm::CGF:
                beta = g_new.squaredNorm() / std::max(1e-300, g_old.squaredNorm());
                break;
            case TrainAlgorithm::CGP:
                beta = g_new.dot(g_new - g_old) / std::max(1e-300, g_old.squaredNorm());
                if (beta < 0.0) beta = 0.0;  // PR+ reset
                break;
            case TrainAlgorithm::CGB:
                // Powell-Beale: restart on loss of conjugacy
                restart = std::abs(g_new.dot(g_old)) >= 0.2 * g_new.squaredNorm();
                if (!restart) {
                    beta = g_new.dot(g_new - g_old) / std::max(1e-300, g_old.squaredNorm());
                    if (beta < 0.0) restart = true;
                }
                break;
            default:
                throw ArgumentError("run_cg: not a CG algorithm");
        }
        if (restart)
            d = -g_new;
        else
            d = -g_new + beta * d;
        g_old = g_new;
        lg.mse = ls->f;
        lg.grad = std::move(g_new);
        first = false;
    }
    st.w = w;
    return st;
}

TrainState run_bfgs(const Objective& obj, Eigen::VectorXd w, const TrainConfig& cfg) {
    TrainState st;
    const Eigen::Index P = w.size();
    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(P, P);
    LossGrad lg = obj.value_and_grad(w);
    bool first = true;

    for (int epoch = 0;; ++epoch) {
        if (stopped(st, cfg, lg.mse, lg.grad.lpNorm<Eigen::Infinity>(), epoch)) break;

        Eigen::VectorXd d = -(Hinv * lg.grad);
        if (!(d.dot(lg.grad) < 0.0)) {  // lost positive definiteness
            Hinv.setIdentity();
            d = -lg.grad;
        }
        const double alpha1 = first ? std::min(1.0, 1.0 / std::max(1e-12, lg.grad.lpNorm<1>()))
                                    : 1.0;
        auto ls = wolfe_line_search(obj, w, d, lg.mse, lg.grad, cfg.wolfe_c1, cfg.wolfe_c2, alpha1);
        if (!ls) {
            Hinv.setIdentity();
            d = -lg.grad;
            ls = wolfe_line_search(obj, w, d, lg.mse, lg.grad, cfg.wolfe_c1, cfg.wolfe_c2, 1.0);
            if (!ls) {
                st.reason = StopReason::LineSearchFail;
                break;
            }
        }
        Eigen::VectorXd s = ls->alpha * d;
        w += s;
        check_finite(w, cfg.algorithm, epoch);
        Eigen::VectorXd yv = ls->grad - lg.grad;
        const double sy = s.dot(yv);
        if (sy > 1e-10) {  // curvature condition; skip update otherwise
            if (first) Hinv *= sy / yv.squaredNorm();
            const double rho = 1.0 / sy;
            Eigen::MatrixXd I = Eigen::MatrixXd::Identity(P, P);
            Eigen::MatrixXd V = I - rho * s * yv.transpose();
            Hinv = V * Hinv * V.transpose() + rho * s * s.transpose();
        }
        lg.mse = ls->f;
        lg.grad = ls->grad;
        first = false;
    }
    st.w = w;
    return st;
}

// Moller's scaled conjugate gradient; no line search.
TrainState run_scg(const Objective& obj, Eigen::VectorXd w, const TrainConfig& cfg) {
    TrainState st;
    const Eigen::Index P = w.size();
    double lambda = cfg.scg_lambda0;
    double lambda_bar = 0.0;
    bool success = true;

    LossGrad lg = obj.value_and_grad(w);
    Eigen::VectorXd r = -lg.grad;
    Eigen::VectorXd p = r;
    double delta = 0.0;
    int since_success = 0;

    for (int epoch = 0;; ++epoch) {
        if (stopped(st, cfg, lg.mse, lg.grad.lpNorm<Eigen::Infinity>(), epoch)) break;

        const double p_norm2 = p.squaredNorm();
        if (p_norm2 < 1e-300) {
            st.reason = StopReason::MinGradient;
            break;
        }
        if (success) {
            const double sigma_k = cfg.scg_sigma / std::sqrt(p_norm2);
            LossGrad lg2 = obj.value_and_grad(w + sigma_k * p);
            delta = p.dot((lg2.grad - lg.grad) / sigma_k);
        }
        delta += (lambda - lambda_bar) * p_norm2;
        if (delta <= 0.0) {  // make the Hessian surrogate positive definite
            lambda_bar = 2.0 * (lambda - delta / p_norm2);
            delta = -delta + lambda * p_norm2;
            lambda = lambda_bar;
        }
        const double mu = p.dot(r);
        const double alpha = mu / delta;
        const double f_new = obj.value(w + alpha * p);
        const double comparison = 2.0 * delta * (lg.mse - f_new) / (mu * mu);

        if (std::isfinite(comparison) && comparison >= 0.0) {
            w += alpha * p;
            check_finite(w, cfg.algorithm, epoch);
            lg = obj.value_and_grad(w);
            Eigen::VectorXd r_new = -lg.grad;
            lambda_bar = 0.0;
            success = true;
            since_success = 0;
            if ((epoch + 1) % static_cast<int>(P) == 0) {
                p = r_new;  // periodic restart
            } else {
                const double beta = (r_new.squaredNorm() - r_new.dot(r)) / mu;
                p = r_new + beta * p;
            }
            r = r_new;
            if (comparison >= 0.75) lambda = std::max(1e-15, 0.25 * lambda);
        } else {
            lambda_bar = lambda;
            success = false;
            if (++since_success > 100 || lambda > 1e100) {
                st.reason = StopReason::LineSearchFail;  // no scale admits progress
                break;
            }
        }
        if (std::isfinite(comparison) && comparison < 0.25)
            lambda += delta * (1.0 - comparison) / p_norm2;
    }
    st.w = w;
    return st;
}

TrainState run_lm(const Objective& obj, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  Eigen::VectorXd w, const TrainConfig& cfg) {
    TrainState st;
    const auto n = static_cast<double>(X.rows());
    double mu = cfg.lm_mu0;

    for (int epoch = 0;; ++epoch) {
        auto p = NetworkParams::unflatten(w, X.cols(), obj.hidden());
        Eigen::VectorXd r = forward(p, X) - y;
        const double sse = r.squaredNorm();
        Eigen::MatrixXd J = jacobian(p, X);
        Eigen::VectorXd grad = (2.0 / n) * (J.transpose() * r);

        if (stopped(st, cfg, sse / n, grad.lpNorm<Eigen::Infinity>(), epoch)) break;

        // cache the Gram matrix; only the damping changes inside the retry loop
        const bool primal = J.cols() <= J.rows();
        Eigen::MatrixXd G = primal ? Eigen::MatrixXd(J.transpose() * J)
                                   : Eigen::MatrixXd(J * J.transpose());
        Eigen::VectorXd Jtr = J.transpose() * r;

        bool accepted = false;
        while (mu <= cfg.lm_mu_max) {
            Eigen::MatrixXd A = G;
            A.diagonal().array() += mu;
            Eigen::VectorXd delta = primal ? Eigen::VectorXd(A.ldlt().solve(-Jtr))
                                           : Eigen::VectorXd(-(J.transpose() * A.ldlt().solve(r)));
            Eigen::VectorXd w_try = w + delta;
            auto p_try = NetworkParams::unflatten(w_try, X.cols(), obj.hidden());
            const double sse_try = (forward(p_try, X) - y).squaredNorm();
            if (std::isfinite(sse_try) && sse_try < sse) {
                w = w_try;
                mu = std::max(mu * cfg.lm_mu_decrease, 1e-20);
                accepted = true;
                break;
            }
            mu *= cfg.lm_mu_increase;
        }
        if (!accepted) {
            st.reason = StopReason::MuOverflow;
            break;
        }
        check_finite(w, cfg.algorithm, epoch);
    }
    st.w = w;
    return st;
}

}  // namespace

TrainedNetwork train(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TrainConfig& cfg,
                     const std::optional<NetworkParams>& init_override) {
    if (cfg.hidden_units < 1) throw ArgumentError("train: hidden_units must be >= 1");
    if (cfg.max_epochs < 1) throw ArgumentError("train: max_epochs must be >= 1");
    if (X.rows() != y.size()) throw ArgumentError("train: X rows != y length");
    if (X.rows() < 2) throw ArgumentError("train: need at least 2 samples");
    {
        const double ymin = y.minCoeff(), ymax = y.maxCoeff();
        if (ymin < 0.0 || ymax > 1.0)
            throw ArgumentError("train: targets must lie in [0, 1]");
        bool binary = true;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            if (y[i] != 0.0 && y[i] != 1.0) binary = false;
        if (binary && ymin == ymax)
            throw ArgumentError("train: targets must contain both classes 0 and 1");
    }

    NetworkParams p0 = init_override
                           ? *init_override
                           : init_network(X.cols(), cfg.hidden_units, cfg.rng_seed);
    if (p0.input_dim() != X.cols() || p0.hidden_units() != cfg.hidden_units)
        throw ArgumentError("train: initial parameters do not match (input_dim, hidden_units)");

    Objective obj(X, y, cfg.hidden_units);
    Eigen::VectorXd w0 = p0.flatten();

    TrainState st;
    switch (cfg.algorithm) {
        case TrainAlgorithm::GD:
        case TrainAlgorithm::GDM:
        case TrainAlgorithm::GDX:
            st = run_gd_family(obj, std::move(w0), cfg);
            break;
        case TrainAlgorithm::RP:
            st = run_rprop(obj, std::move(w0), cfg);
            break;
        case TrainAlgorithm::CGF:
        case TrainAlgorithm::CGP:
        case TrainAlgorithm::CGB:
            st = run_cg(obj, std::move(w0), cfg);
            break;
        case TrainAlgorithm::BFG:
            st = run_bfgs(obj, std::move(w0), cfg);
            break;
        case TrainAlgorithm::SCG:
            st = run_scg(obj, std::move(w0), cfg);
            break;
        case TrainAlgorithm::LM:
            st = run_lm(obj, X, y, std::move(w0), cfg);
            break;
    }

    TrainedNetwork t;
    t.params = NetworkParams::unflatten(st.w, X.cols(), cfg.hidden_units);
    t.training_trace = std::move(st.trace);
    t.stop_reason = st.reason;
    t.config = cfg;
    return t;
}

std::vector<int> predict_labels(const TrainedNetwork& t, const Eigen::MatrixXd& raw_rows) {
    Eigen::MatrixXd z = apply_standardizer(t.standardizer, raw_rows);
    Eigen::MatrixXd sliced = columns_of(z, t.feature_subset);
    Eigen::VectorXd o = forward(t.params, sliced);
    std::vector<int> labels(static_cast<std::size_t>(o.size()));
    for (Eigen::Index i = 0; i < o.size(); ++i)
        labels[static_cast<std::size_t>(i)] = o[i] >= 0.5 ? 1 : 0;
    return labels;
}

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

}  // namespace

std::string trained_network_to_json(const TrainedNetwork& t) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["input_dim"] = t.params.input_dim();
    j["hidden_units"] = t.params.hidden_units();
    j["weights"] = vec_to_json(t.params.flatten());  // W1 row-major, b1, W2, b2
    j["feature_subset"] = t.feature_subset;
    j["standardizer"]["mean"] = vec_to_json(t.standardizer.mean);
    j["standardizer"]["stddev"] = vec_to_json(t.standardizer.stddev);
    j["standardizer"]["zero_variance"] = t.standardizer.zero_variance;
    j["standardizer"]["passthrough"] = t.standardizer.passthrough;
    j["training_trace"] = t.training_trace;
    j["stop_reason"] = to_string(t.stop_reason);
    j["config"]["algorithm"] = to_string(t.config.algorithm);
    j["config"]["hidden_units"] = t.config.hidden_units;
    j["config"]["max_epochs"] = t.config.max_epochs;
    j["config"]["goal_mse"] = t.config.goal_mse;
    j["config"]["min_gradient"] = t.config.min_gradient;
    j["config"]["learning_rate"] = t.config.learning_rate;
    j["config"]["momentum"] = t.config.momentum;
    j["config"]["rng_seed"] = t.config.rng_seed;
    return j.dump(2);
}

TrainedNetwork trained_network_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format_version").get<int>() != 1)
        throw ParseError("trained network record: unsupported format version");
    TrainedNetwork t;
    const auto input_dim = j.at("input_dim").get<Eigen::Index>();
    const auto hidden = j.at("hidden_units").get<Eigen::Index>();
    t.params = NetworkParams::unflatten(vec_from_json(j.at("weights")), input_dim, hidden);
    t.feature_subset = j.at("feature_subset").get<std::vector<int>>();
    t.standardizer.mean = vec_from_json(j.at("standardizer").at("mean"));
    t.standardizer.stddev = vec_from_json(j.at("standardizer").at("stddev"));
    t.standardizer.zero_variance =
        j.at("standardizer").at("zero_variance").get<std::vector<char>>();
    t.standardizer.passthrough = j.at("standardizer").at("passthrough").get<std::vector<char>>();
    t.training_trace = j.at("training_trace").get<std::vector<double>>();
    for (auto r : {StopReason::MaxEpochs, StopReason::Goal, StopReason::MinGradient,
                   StopReason::MuOverflow, StopReason::LineSearchFail})
        if (to_string(r) == j.at("stop_reason").get<std::string>()) t.stop_reason = r;
    t.config.algorithm = train_algorithm_from_string(j.at("config").at("algorithm"));
    t.config.hidden_units = j.at("config").at("hidden_units").get<int>();
    t.config.max_epochs = j.at("config").at("max_epochs").get<int>();
    t.config.goal_mse = j.at("config").at("goal_mse").get<double>();
    t.config.min_gradient = j.at("config").at("min_gradient").get<double>();
    t.config.learning_rate = j.at("config").at("learning_rate").get<double>();
    t.config.momentum = j.at("config").at("momentum").get<double>();
    t.config.rng_seed = j.at("config").at("rng_seed").get<std::uint64_t>();
    return t;
}

}  // namespace voxsel
