#include "rris/mlp.hpp"

#include <cmath>

#include "rris/error.hpp"

namespace rris {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::tanh: return "tanh";
        case Activation::relu: return "relu";
    }
    return "identity";
}

Activation parse_activation(const std::string& s) {
    if (s == "identity") return Activation::identity;
    if (s == "tanh") return Activation::tanh;
    if (s == "relu") return Activation::relu;
    throw InvalidArgument("unknown activation '" + s + "'");
}

namespace {

void apply_activation(Activation a, Matrix& z) {
    switch (a) {
        case Activation::identity: break;
        case Activation::tanh: {
            // 1 - 2/(e^{2z}+1) vectorises where the library tanh for doubles does not
            const auto e = (2.0 * z.array().max(-20.0).min(20.0)).exp();
            z = (1.0 - 2.0 / (e + 1.0)).matrix();
            break;
        }
        case Activation::relu: z = z.cwiseMax(0.0); break;
    }
}

// grad w.r.t. pre-activation, given the post-activation output y
Matrix activation_backward(Activation a, const Matrix& y, const Matrix& grad) {
    switch (a) {
        case Activation::identity: return grad;
        case Activation::tanh: return (grad.array() * (1.0 - y.array().square())).matrix();
        case Activation::relu: return (grad.array() * (y.array() > 0.0).cast<double>()).matrix();
    }
    return grad;
}

} // namespace

Mlp::Mlp(std::vector<int> widths, std::vector<Activation> activations)
    : widths_(std::move(widths)), activations_(std::move(activations)) {
    if (widths_.size() < 2 || activations_.size() != widths_.size() - 1) {
        throw InvalidArgument("an MLP needs >= 2 widths and one activation per layer");
    }
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        if (widths_[l] < 1 || widths_[l + 1] < 1) throw InvalidArgument("layer widths must be >= 1");
        offsets_.push_back(off);
        off += static_cast<std::size_t>(widths_[l + 1]) * static_cast<std::size_t>(widths_[l]) +
               static_cast<std::size_t>(widths_[l + 1]);
    }
    params_.assign(off, 0.0);
}

Eigen::Map<Matrix> Mlp::weight(std::size_t l) {
    return {params_.data() + offsets_[l], widths_[l + 1], widths_[l]};
}

Eigen::Map<const Matrix> Mlp::weight(std::size_t l) const {
    return {params_.data() + offsets_[l], widths_[l + 1], widths_[l]};
}

Eigen::Map<Vector> Mlp::bias(std::size_t l) {
    return {params_.data() + offsets_[l] + static_cast<std::size_t>(widths_[l + 1] * widths_[l]), widths_[l + 1]};
}

Eigen::Map<const Vector> Mlp::bias(std::size_t l) const {
    return {params_.data() + offsets_[l] + static_cast<std::size_t>(widths_[l + 1] * widths_[l]), widths_[l + 1]};
}

void Mlp::init(Rng& rng, double last_scale) {
    for (std::size_t l = 0; l < num_layers(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(widths_[l]));
        const double scale = (l + 1 == num_layers()) ? last_scale : 1.0;
        std::uniform_real_distribution<double> u(-bound, bound);
        auto w = weight(l);
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = scale * u(rng);
        }
        bias(l).setZero();
    }
}

Matrix Mlp::forward(const Matrix& input) const {
    if (input.rows() != input_dim()) throw InvalidArgument("input width does not match the first layer");
    Matrix x = input;
    for (std::size_t l = 0; l < num_layers(); ++l) {
        Matrix z = weight(l) * x;
        z.colwise() += bias(l);
        apply_activation(activations_[l], z);
        x = std::move(z);
    }
    return x;
}

Matrix Mlp::forward(const Matrix& input, Tape& tape) const {
    if (input.rows() != input_dim()) throw InvalidArgument("input width does not match the first layer");
    tape.inputs.clear();
    tape.outputs.clear();
    Matrix x = input;
    for (std::size_t l = 0; l < num_layers(); ++l) {
        tape.inputs.push_back(x);
        Matrix z = weight(l) * x;
        z.colwise() += bias(l);
        apply_activation(activations_[l], z);
        tape.outputs.push_back(z);
        x = std::move(z);
    }
    return x;
}

Vector Mlp::forward(std::span<const double> input) const {
    const Eigen::Map<const Matrix> in(input.data(), static_cast<Eigen::Index>(input.size()), 1);
    return forward(Matrix(in)).col(0);
}

Matrix Mlp::backward(const Tape& tape, const Matrix& grad_output, std::span<double> grads) const {
    if (tape.empty() || tape.inputs.size() != num_layers()) {
        throw InvalidState("backward() needs a recorded forward pass of this network");
    }
    const bool want_params = !grads.empty();
    if (want_params && grads.size() != params_.size()) throw InvalidArgument("gradient buffer has the wrong size");
    if (grad_output.rows() != output_dim() || grad_output.cols() != tape.outputs.back().cols()) {
        throw InvalidArgument("output gradient shape does not match the recorded pass");
    }
    Matrix g = grad_output;
    for (std::size_t l = num_layers(); l-- > 0;) {
        const Matrix dz = activation_backward(activations_[l], tape.outputs[l], g);
        if (want_params) {
            const auto rows = widths_[l + 1];
            const auto cols = widths_[l];
            Eigen::Map<Matrix> gw(grads.data() + offsets_[l], rows, cols);
            Eigen::Map<Vector> gb(grads.data() + offsets_[l] + static_cast<std::size_t>(rows * cols), rows);
            gw.noalias() += dz * tape.inputs[l].transpose();
            gb += dz.rowwise().sum();
        }
        g = weight(l).transpose() * dz;
    }
    return g;
}

Mlp make_mlp(int in, int hidden, int layers, int out, Activation act) {
    std::vector<int> widths{in};
    std::vector<Activation> acts;
    for (int i = 0; i < layers; ++i) {
        widths.push_back(hidden);
        acts.push_back(act);
    }
    widths.push_back(out);
    acts.push_back(Activation::identity);
    return Mlp(std::move(widths), std::move(acts));
}

void Adam::step(std::span<double> params, std::span<const double> grads, double lr) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw InvalidArgument("Adam state does not match the parameter vector");
    }
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grads[i];
        v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grads[i] * grads[i];
        const double mh = m_[i] / c1;
        const double vh = v_[i] / c2;
        params[i] -= lr * mh / (std::sqrt(vh) + cfg_.eps);
    }
}

void Adam::restore(long t, std::vector<double> m, std::vector<double> v) {
    if (m.size() != m_.size() || v.size() != v_.size()) throw InvalidArgument("Adam moments have the wrong size");
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
}

void polyak_update(Mlp& target, const Mlp& online, double blend) {
    auto& t = target.params();
    const auto& o = online.params();
    if (t.size() != o.size()) throw InvalidArgument("polyak update between differently shaped networks");
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = blend * o[i] + (1.0 - blend) * t[i];
}

} // namespace rris
