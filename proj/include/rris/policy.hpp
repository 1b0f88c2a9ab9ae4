#pragma once

#include <span>
#include <vector>

#include "rris/mlp.hpp"

namespace rris {

/// tanh-squashed diagonal Gaussian on top of a network whose output is
/// [mean (A); log_std (A)].
struct GaussianPolicyHead {
    double log_std_min = -20.0;
    double log_std_max = 2.0;
};

struct SquashedBatch {
    Matrix mean;      // A x B
    Matrix log_std;   // A x B, clamped
    Matrix clamped;   // 1 where log_std hit the clamp (no gradient), else 0
    Matrix noise;     // standard normal draws
    Matrix pre_tanh;  // mean + std * noise
    Matrix action;    // tanh(pre_tanh), strictly inside (-1, 1)
    Eigen::RowVectorXd log_prob;
};

/// log(1 - tanh(u)^2) evaluated without cancellation.
double log_one_minus_tanh_sq(double u);

double squash(double u);

/// Samples actions for every column of `head_output` (2A x B). With
/// `deterministic` the noise is zero and the action is tanh(mean).
SquashedBatch sample_squashed(const GaussianPolicyHead& head, const Matrix& head_output, Rng& rng,
                              bool deterministic = false);

/// d(loss)/d(head_output) for a loss that depends on the sampled action and
/// its log-probability through the reparameterisation.
Matrix squashed_backward(const SquashedBatch& s, const Matrix& grad_action, const Eigen::RowVectorXd& grad_log_prob);

struct ActionSample {
    std::vector<double> action;  // in (-1,1)^A
    double log_prob = 0.0;
};

ActionSample sample_action(const Mlp& actor, const GaussianPolicyHead& head, std::span<const double> obs, Rng& rng,
                           bool deterministic = false);

} // namespace rris
