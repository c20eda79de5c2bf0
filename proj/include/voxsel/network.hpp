#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "voxsel/common.hpp"

namespace voxsel {

// One hidden layer, tanh hidden units, logistic output unit.
// Flattened parameter order (used by gradients, the Jacobian, and
// serialization): W1 row-major, b1, W2, b2.
struct NetworkParams {
    Eigen::MatrixXd W1;     // hidden x input
    Eigen::VectorXd b1;     // hidden
    Eigen::RowVectorXd W2;  // 1 x hidden
    double b2 = 0.0;

    Eigen::Index input_dim() const { return W1.cols(); }
    Eigen::Index hidden_units() const { return W1.rows(); }
    Eigen::Index parameter_count() const {
        return W1.size() + b1.size() + W2.size() + 1;
    }

    Eigen::VectorXd flatten() const;
    static NetworkParams unflatten(const Eigen::VectorXd& v, Eigen::Index input_dim,
                                   Eigen::Index hidden_units);
    bool all_finite() const;
};

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer, biases 0.
NetworkParams init_network(Eigen::Index input_dim, Eigen::Index hidden_units,
                           std::uint64_t rng_seed);

// Row-wise logistic(W2 tanh(W1 x + b1) + b2); result strictly inside (0,1).
Eigen::VectorXd forward(const NetworkParams& p, const Eigen::MatrixXd& X);

// mse = (1/n) sum (o_i - y_i)^2 with the exact gradient in flattened order.
struct LossGrad {
    double mse = 0.0;
    Eigen::VectorXd grad;
};

LossGrad loss_and_gradient(const NetworkParams& p, const Eigen::MatrixXd& X,
                           const Eigen::VectorXd& y);

// J(i, j) = d residual_i / d param_j with residual_i = o_i - y_i.
// Identity: (2/n) J^T r equals loss_and_gradient's grad.
Eigen::MatrixXd jacobian(const NetworkParams& p, const Eigen::MatrixXd& X);

// One damped Gauss-Newton step: solves (J^T J + mu I) delta = -J^T r.
// Uses the n x n dual system when parameters outnumber samples.
Eigen::VectorXd lm_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& r, double mu);

}  // namespace voxsel
