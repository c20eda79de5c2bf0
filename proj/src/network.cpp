#include "voxsel/network.hpp"

#include <cmath>

namespace voxsel {

Eigen::VectorXd NetworkParams::flatten() const {
    Eigen::VectorXd v(parameter_count());
    Eigen::Index at = 0;
    for (Eigen::Index h = 0; h < W1.rows(); ++h)
        for (Eigen::Index i = 0; i < W1.cols(); ++i) v[at++] = W1(h, i);
    for (Eigen::Index h = 0; h < b1.size(); ++h) v[at++] = b1[h];
    for (Eigen::Index h = 0; h < W2.size(); ++h) v[at++] = W2[h];
    v[at++] = b2;
    return v;
}

NetworkParams NetworkParams::unflatten(const Eigen::VectorXd& v, Eigen::Index input_dim,
                                       Eigen::Index hidden_units) {
    if (v.size() != hidden_units * input_dim + 2 * hidden_units + 1)
        throw ArgumentError("unflatten: vector size does not match (input_dim, hidden_units)");
    NetworkParams p;
    p.W1.resize(hidden_units, input_dim);
    p.b1.resize(hidden_units);
    p.W2.resize(hidden_units);
    Eigen::Index at = 0;
    for (Eigen::Index h = 0; h < hidden_units; ++h)
        for (Eigen::Index i = 0; i < input_dim; ++i) p.W1(h, i) = v[at++];
    for (Eigen::Index h = 0; h < hidden_units; ++h) p.b1[h] = v[at++];
    for (Eigen::Index h = 0; h < hidden_units; ++h) p.W2[h] = v[at++];
    p.b2 = v[at++];
    return p;
}

bool NetworkParams::all_finite() const {
    return W1.allFinite() && b1.allFinite() && W2.allFinite() && std::isfinite(b2);
}

NetworkParams init_network(Eigen::Index input_dim, Eigen::Index hidden_units,
                           std::uint64_t rng_seed) {
    if (input_dim < 1 || hidden_units < 1)
        throw ArgumentError("init_network: dimensions must be >= 1");
    Rng rng(rng_seed);
    NetworkParams p;
    p.W1.resize(hidden_units, input_dim);
    p.b1 = Eigen::VectorXd::Zero(hidden_units);
    p.W2.resize(hidden_units);
    p.b2 = 0.0;
    const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_units));
    // draw order matches the flattened layout
    for (Eigen::Index h = 0; h < hidden_units; ++h)
        for (Eigen::Index i = 0; i < input_dim; ++i) p.W1(h, i) = uniform_range(rng, -s1, s1);
    for (Eigen::Index h = 0; h < hidden_units; ++h) p.W2[h] = uniform_range(rng, -s2, s2);
    return p;
}

namespace {

inline Eigen::VectorXd logistic(const Eigen::VectorXd& z) {
    return (1.0 + (-z.array()).exp()).inverse().matrix();
}

struct ForwardCache {
    Eigen::MatrixXd A;  // n x hidden, tanh activations
    Eigen::VectorXd o;  // n outputs
};

ForwardCache forward_cached(const NetworkParams& p, const Eigen::MatrixXd& X) {
    if (X.cols() != p.input_dim())
        throw ArgumentError("forward: input has " + std::to_string(X.cols()) +
                            " columns, network expects " + std::to_string(p.input_dim()));
    ForwardCache c;
    c.A = ((X * p.W1.transpose()).rowwise() + p.b1.transpose()).array().tanh();
    Eigen::VectorXd z = (c.A * p.W2.transpose()).array() + p.b2;
    c.o = logistic(z);
    return c;
}

}  // namespace

Eigen::VectorXd forward(const NetworkParams& p, const Eigen::MatrixXd& X) {
    return forward_cached(p, X).o;
}

LossGrad loss_and_gradient(const NetworkParams& p, const Eigen::MatrixXd& X,
                           const Eigen::VectorXd& y) {
    if (X.rows() != y.size()) throw ArgumentError("loss_and_gradient: X rows != y length");
    const auto n = static_cast<double>(X.rows());
    ForwardCache c = forward_cached(p, X);

    Eigen::VectorXd r = c.o - y;
    LossGrad out;
    out.mse = r.squaredNorm() / n;

    // dz_i = d mse / d z_i through the logistic output
    Eigen::VectorXd dz = (2.0 / n) * r.array() * c.o.array() * (1.0 - c.o.array());

    Eigen::RowVectorXd gW2 = dz.transpose() * c.A;
    const double gb2 = dz.sum();
    Eigen::MatrixXd dpre =
        (dz * p.W2).array() * (1.0 - c.A.array().square());  // n x hidden
    Eigen::MatrixXd gW1 = dpre.transpose() * X;
    Eigen::VectorXd gb1 = dpre.colwise().sum();

    NetworkParams g;
    g.W1 = std::move(gW1);
    g.b1 = std::move(gb1);
    g.W2 = std::move(gW2);
    g.b2 = gb2;
    out.grad = g.flatten();
    return out;
}

Eigen::MatrixXd jacobian(const NetworkParams& p, const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    const Eigen::Index H = p.hidden_units();
    const Eigen::Index I = p.input_dim();
    ForwardCache c = forward_cached(p, X);

    Eigen::VectorXd do_dz = c.o.array() * (1.0 - c.o.array());
    Eigen::MatrixXd J(n, p.parameter_count());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = do_dz[i];
        Eigen::Index at = 0;
        // dz/dW1(h,k) = W2_h (1 - A_ih^2) x_ik
        for (Eigen::Index h = 0; h < H; ++h) {
            const double back = s * p.W2[h] * (1.0 - c.A(i, h) * c.A(i, h));
            for (Eigen::Index k = 0; k < I; ++k) J(i, at++) = back * X(i, k);
        }
        for (Eigen::Index h = 0; h < H; ++h)
            J(i, at++) = s * p.W2[h] * (1.0 - c.A(i, h) * c.A(i, h));
        for (Eigen::Index h = 0; h < H; ++h) J(i, at++) = s * c.A(i, h);
        J(i, at++) = s;
    }
    return J;
}

Eigen::VectorXd lm_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& r, double mu) {
    const Eigen::Index n = J.rows();
    const Eigen::Index P = J.cols();
    if (P <= n) {
        Eigen::MatrixXd A = J.transpose() * J;
        A.diagonal().array() += mu;
        return A.ldlt().solve(-(J.transpose() * r));
    }
    // (J^T J + mu I)^-1 J^T = J^T (J J^T + mu I)^-1
    Eigen::MatrixXd A = J * J.transpose();
    A.diagonal().array() += mu;
    return -(J.transpose() * A.ldlt().solve(r));
}

}  // namespace voxsel
