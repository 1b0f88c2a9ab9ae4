#include "rris/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rris/error.hpp"

namespace rris {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

} // namespace

double log_one_minus_tanh_sq(double u) {
    return 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u));
}

double squash(double u) {
    const double a = std::tanh(u);
    // keep strictly inside (-1, 1) when tanh saturates
    if (a >= 1.0) return std::nextafter(1.0, 0.0);
    if (a <= -1.0) return std::nextafter(-1.0, 0.0);
    return a;
}

SquashedBatch sample_squashed(const GaussianPolicyHead& head, const Matrix& head_output, Rng& rng,
                              bool deterministic) {
    if (head_output.rows() % 2 != 0) throw InvalidArgument("policy head output must hold mean and log-std");
    const Eigen::Index A = head_output.rows() / 2;
    const Eigen::Index B = head_output.cols();
    SquashedBatch s;
    s.mean = head_output.topRows(A);
    s.log_std.resize(A, B);
    s.clamped.resize(A, B);
    s.noise.resize(A, B);
    s.pre_tanh.resize(A, B);
    s.action.resize(A, B);
    s.log_prob.resize(B);
    std::normal_distribution<double> g(0.0, 1.0);
    for (Eigen::Index b = 0; b < B; ++b) {
        double lp = 0.0;
        for (Eigen::Index i = 0; i < A; ++i) {
            const double raw_ls = head_output(A + i, b);
            const double ls = std::clamp(raw_ls, head.log_std_min, head.log_std_max);
            s.clamped(i, b) = (raw_ls != ls) ? 1.0 : 0.0;
            s.log_std(i, b) = ls;
            const double eps = deterministic ? 0.0 : g(rng);
            s.noise(i, b) = eps;
            const double u = s.mean(i, b) + std::exp(ls) * eps;
            s.pre_tanh(i, b) = u;
            s.action(i, b) = squash(u);
            lp += -0.5 * eps * eps - ls - kHalfLog2Pi - log_one_minus_tanh_sq(u);
        }
        s.log_prob(b) = lp;
    }
    return s;
}

Matrix squashed_backward(const SquashedBatch& s, const Matrix& grad_action, const Eigen::RowVectorXd& grad_log_prob) {
    const Eigen::Index A = s.mean.rows();
    const Eigen::Index B = s.mean.cols();
    Matrix g(2 * A, B);
    for (Eigen::Index b = 0; b < B; ++b) {
        for (Eigen::Index i = 0; i < A; ++i) {
            const double u = s.pre_tanh(i, b);
            const double t = std::tanh(u);
            const double sigma_eps = std::exp(s.log_std(i, b)) * s.noise(i, b);
            // d log_prob / du = 2 tanh(u); d action / du = 1 - tanh(u)^2
            const double dl_du = grad_action(i, b) * (1.0 - t * t) + grad_log_prob(b) * 2.0 * t;
            g(i, b) = dl_du;
            const double dl_dls = dl_du * sigma_eps - grad_log_prob(b);
            g(A + i, b) = s.clamped(i, b) != 0.0 ? 0.0 : dl_dls;
        }
    }
    return g;
}

ActionSample sample_action(const Mlp& actor, const GaussianPolicyHead& head, std::span<const double> obs, Rng& rng,
                           bool deterministic) {
    const Eigen::Map<const Matrix> in(obs.data(), static_cast<Eigen::Index>(obs.size()), 1);
    const Matrix out = actor.forward(Matrix(in));
    const SquashedBatch s = sample_squashed(head, out, rng, deterministic);
    ActionSample a;
    a.action.assign(s.action.data(), s.action.data() + s.action.size());
    a.log_prob = s.log_prob(0);
    return a;
}

} // namespace rris
