#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voxsel/dataset.hpp"
#include "voxsel/network.hpp"

namespace voxsel {

enum class TrainAlgorithm { LM, RP, BFG, SCG, CGB, CGF, CGP, GD, GDX, GDM };

std::string to_string(TrainAlgorithm a);
TrainAlgorithm train_algorithm_from_string(const std::string& s);

struct TrainConfig {
    TrainAlgorithm algorithm = TrainAlgorithm::LM;
    int hidden_units = 10;
    int max_epochs = 1000;
    double goal_mse = 0.0;
    double min_gradient = 1e-7;
    std::uint64_t rng_seed = 0;

    // gradient-descent family
    double learning_rate = 0.01;
    double momentum = 0.9;
    double lr_increase = 1.05;   // GDX
    double lr_decrease = 0.7;    // GDX
    double max_perf_increase = 1.04;

    // Rprop (iRprop-)
    double rprop_delta0 = 0.07;
    double rprop_eta_plus = 1.2;
    double rprop_eta_minus = 0.5;
    double rprop_delta_min = 1e-6;
    double rprop_delta_max = 50.0;

    // Levenberg-Marquardt
    double lm_mu0 = 1e-3;
    double lm_mu_increase = 10.0;
    double lm_mu_decrease = 0.1;
    double lm_mu_max = 1e10;

    // scaled conjugate gradient
    double scg_sigma = 5e-5;
    double scg_lambda0 = 5e-7;

    // strong-Wolfe line search (CG family, BFGS)
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.1;
};

enum class StopReason { MaxEpochs, Goal, MinGradient, MuOverflow, LineSearchFail };

std::string to_string(StopReason r);

struct TrainedNetwork {
    NetworkParams params;
    std::vector<int> feature_subset;   // original column indices, ascending
    Standardizer standardizer;
    std::vector<double> training_trace;  // per-epoch MSE
    StopReason stop_reason = StopReason::MaxEpochs;
    TrainConfig config;
};

// Full-batch training of y in {0,1} targets. X columns are the network inputs
// (already standardized and sliced by the caller). feature_subset/standardizer
// of the result are left empty for the caller to fill.
// `init_override` substitutes the seeded initialization (tests, symmetry checks).
TrainedNetwork train(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TrainConfig& cfg,
                     const std::optional<NetworkParams>& init_override = std::nullopt);

// Standardize full-width raw rows, slice to the stored subset, forward,
// threshold at 0.5 (exactly 0.5 maps to class 1).
std::vector<int> predict_labels(const TrainedNetwork& t, const Eigen::MatrixXd& raw_rows);

std::string trained_network_to_json(const TrainedNetwork& t);
TrainedNetwork trained_network_from_json(const std::string& text);

}  // namespace voxsel
