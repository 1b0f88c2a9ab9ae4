#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rris/scenario.hpp"

namespace rris {

enum class Activation { identity, tanh, relu };

std::string to_string(Activation a);
Activation parse_activation(const std::string& s);

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Flat parameter storage. The fixed alignment keeps vectorised kernels on the
/// same code path from run to run, so results are reproducible bit for bit.
using ParamVector = std::vector<double, Eigen::aligned_allocator<double>>;

/// Activations recorded by a forward pass; columns are batch entries.
struct Tape {
    std::vector<Matrix> inputs;   // input of layer l
    std::vector<Matrix> outputs;  // post-activation output of layer l

    bool empty() const { return inputs.empty(); }
};

/// Fully connected network whose parameters live in one flat buffer, laid out
/// layer by layer as [W (out x in, column-major), b (out)].
class Mlp {
public:
    Mlp() = default;
    Mlp(std::vector<int> widths, std::vector<Activation> activations);

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases; the last
    /// layer is scaled by `last_scale`.
    void init(Rng& rng, double last_scale = 1.0);

    Matrix forward(const Matrix& input) const;
    Matrix forward(const Matrix& input, Tape& tape) const;
    Vector forward(std::span<const double> input) const;

    /// Accumulates d(loss)/d(params) into `grads` (skipped when empty) and
    /// returns d(loss)/d(input).
    Matrix backward(const Tape& tape, const Matrix& grad_output, std::span<double> grads) const;

    int input_dim() const { return widths_.front(); }
    int output_dim() const { return widths_.back(); }
    std::size_t num_layers() const { return activations_.size(); }
    const std::vector<int>& widths() const { return widths_; }
    const std::vector<Activation>& activations() const { return activations_; }

    ParamVector& params() { return params_; }
    const ParamVector& params() const { return params_; }
    std::size_t num_params() const { return params_.size(); }

    Eigen::Map<Matrix> weight(std::size_t layer);
    Eigen::Map<const Matrix> weight(std::size_t layer) const;
    Eigen::Map<Vector> bias(std::size_t layer);
    Eigen::Map<const Vector> bias(std::size_t layer) const;

private:
    std::vector<int> widths_;
    std::vector<Activation> activations_;
    std::vector<std::size_t> offsets_;
    ParamVector params_;
};

/// Hidden layers of `hidden` units with `act`, identity output.
Mlp make_mlp(int in, int hidden, int layers, int out, Activation act);

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction over a flat parameter vector.
class Adam {
public:
    Adam() = default;
    explicit Adam(std::size_t n, AdamConfig cfg = {}) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

    void step(std::span<double> params, std::span<const double> grads, double lr);

    long steps() const { return t_; }
    const std::vector<double>& first_moment() const { return m_; }
    const std::vector<double>& second_moment() const { return v_; }
    const AdamConfig& config() const { return cfg_; }
    void restore(long t, std::vector<double> m, std::vector<double> v);

private:
    AdamConfig cfg_;
    std::vector<double> m_;
    std::vector<double> v_;
    long t_ = 0;
};

/// target <- blend * online + (1 - blend) * target
void polyak_update(Mlp& target, const Mlp& online, double blend);

} // namespace rris
