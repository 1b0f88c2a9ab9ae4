#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "rris/mlp.hpp"

namespace rris {

struct PpoConfig {
    double gamma = 0.95;
    double gae_lambda = 0.95;
    double clip = 0.2;
    double lr_actor = 3e-4;
    double lr_critic = 1e-3;
    double entropy_coef = 0.0;
    int epochs = 10;
    int minibatch = 64;
    int rollout_steps = 2048;
    int hidden = 64;
    int layers = 2;
    double init_log_std = -0.5;
    bool normalize_advantages = true;
    Activation activation = Activation::tanh;
};

struct PpoSample {
    std::vector<double> action;    // tanh(pre_tanh), in (-1,1)
    std::vector<double> pre_tanh;  // Gaussian sample the log-prob refers to
    double log_prob = 0.0;         // of pre_tanh under the Gaussian
    double value = 0.0;
};

/// On-policy trajectory storage. Columns are time steps.
struct Rollout {
    std::vector<std::vector<double>> obs;
    std::vector<std::vector<double>> pre_tanh;
    std::vector<double> log_prob;
    std::vector<double> reward;
    std::vector<double> value;
    std::vector<double> done;
    std::vector<double> advantage;
    std::vector<double> ret;

    std::size_t size() const { return reward.size(); }
    void add(std::span<const double> o, const PpoSample& s, double r, bool d);
    void clear();
};

/// Generalised advantage estimates; `last_value` bootstraps a trailing partial episode.
void compute_gae(Rollout& r, double gamma, double lambda, double last_value);

struct PpoLosses {
    double policy = 0.0;
    double value = 0.0;
    double entropy = 0.0;
    double clipped_fraction = 0.0;
};

/// Gaussian policy with a state-independent log-std, tanh applied outside the
/// likelihood, and a separate value network.
class PpoAgent {
public:
    PpoAgent(int obs_dim, int act_dim, PpoConfig config, std::uint64_t seed);

    PpoSample act(std::span<const double> obs, bool deterministic = false);
    double value(std::span<const double> obs) const;

    /// Gaussian log-density of `pre_tanh` for every column of `obs`.
    Eigen::RowVectorXd log_prob(const Matrix& obs, const Matrix& pre_tanh) const;

    const PpoConfig& config() const { return config_; }
    int obs_dim() const { return obs_dim_; }
    int act_dim() const { return act_dim_; }
    Rng& rng() { return rng_; }

    Mlp actor, critic;
    std::vector<double> log_std;

    nlohmann::json to_json() const;
    static PpoAgent from_json(const nlohmann::json& j);

    friend PpoLosses ppo_update(PpoAgent& agent, const Rollout& rollout);

private:
    int obs_dim_;
    int act_dim_;
    PpoConfig config_;
    Rng rng_;
    Adam actor_opt_, log_std_opt_, critic_opt_;
};

/// Clipped-surrogate policy step plus value regression over `epochs` passes of
/// shuffled minibatches. Advantages must already be filled in.
PpoLosses ppo_update(PpoAgent& agent, const Rollout& rollout);

} // namespace rris
