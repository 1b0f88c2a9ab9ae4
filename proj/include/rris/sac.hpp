#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "rris/mlp.hpp"
#include "rris/policy.hpp"

namespace rris {

struct Batch {
    Matrix obs;       // O x B
    Matrix action;    // A x B
    Eigen::RowVectorXd reward;
    Matrix next_obs;  // O x B
    Eigen::RowVectorXd done;
};

/// Fixed-capacity FIFO of transitions.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, int obs_dim, int act_dim);

    void add(std::span<const double> obs, std::span<const double> action, double reward,
             std::span<const double> next_obs, bool done);

    /// Uniform batch without replacement (batch_size is capped at size()).
    Batch sample(std::size_t batch_size, Rng& rng) const;

    /// Transition at logical index i, 0 = oldest.
    Batch at(std::size_t i) const;

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }

private:
    void copy_into(Batch& b, std::size_t col, std::size_t slot) const;

    std::size_t capacity_;
    int obs_dim_;
    int act_dim_;
    std::size_t size_ = 0;
    std::size_t head_ = 0;  // next write slot
    std::vector<double> obs_, act_, rew_, next_obs_, done_;
};

struct SacConfig {
    double gamma = 0.95;
    double temperature = 0.2;
    bool auto_temperature = false;
    double target_entropy = 0.0;  // 0 selects -dim(action)
    double polyak = 0.005;
    double lr_actor = 3e-4;
    double lr_critic = 3e-4;
    double lr_temperature = 3e-4;
    int batch_size = 256;
    int buffer_size = 100000;
    int warmup_steps = 1000;
    int hidden = 128;
    int layers = 2;
    int update_every = 1;  // env steps between gradient updates
    Activation activation = Activation::tanh;
    GaussianPolicyHead head;
};

struct SacLosses {
    double critic1 = 0.0;
    double critic2 = 0.0;
    double actor = 0.0;
    double temperature = 0.0;
    double mean_log_prob = 0.0;
};

class SacAgent {
public:
    SacAgent(int obs_dim, int act_dim, SacConfig config, std::uint64_t seed);

    ActionSample act(std::span<const double> obs, bool deterministic = false);

    /// Critic targets r + gamma (1-d)(min target Q(s',a') - alpha log pi(a'|s')), a' ~ pi(s').
    Eigen::RowVectorXd critic_target(const Batch& batch);

    SacLosses update(const Batch& batch);

    double temperature() const;
    double target_entropy() const;
    int obs_dim() const { return obs_dim_; }
    int act_dim() const { return act_dim_; }
    const SacConfig& config() const { return config_; }

    Mlp actor, q1, q2, q1_target, q2_target;

    nlohmann::json to_json() const;
    static SacAgent from_json(const nlohmann::json& j);

    Rng& rng() { return rng_; }

private:
    Matrix critic_input(const Matrix& obs, const Matrix& action) const;

    int obs_dim_;
    int act_dim_;
    SacConfig config_;
    Rng rng_;
    Adam actor_opt_, q1_opt_, q2_opt_, alpha_opt_;
    double log_alpha_;
    long updates_ = 0;
};

nlohmann::json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);
nlohmann::json adam_to_json(const Adam& opt);
Adam adam_from_json(const nlohmann::json& j);
nlohmann::json rng_to_json(const Rng& rng);
Rng rng_from_json(const nlohmann::json& j);

} // namespace rris
