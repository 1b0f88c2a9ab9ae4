#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rris/config.hpp"
#include "rris/env.hpp"

namespace rris {

/// Independent 64-bit seed for (base, purpose, index), via splitmix64.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t purpose, std::uint64_t index);

/// Environment settings for one agent kind: fixed and random pin the rotation
/// mode, the others learn it.
EnvConfig env_for_agent(const ExperimentConfig& cfg, AgentKind kind);

class Policy {
public:
    virtual ~Policy() = default;
    /// Raw action in [-1,1]^(1+N+K) for the current state of `env`.
    virtual std::vector<double> act(const Env& env, const std::vector<double>& obs) = 0;
};

/// Deterministic evaluation policy stored in a checkpoint (mean action for the learners).
std::unique_ptr<Policy> policy_from_checkpoint(const nlohmann::json& checkpoint, const ExperimentConfig& cfg,
                                               std::uint64_t seed);

struct EpisodeOutcome {
    double energy = 0.0;     // sum of E_off and E_loc over UEs and slots, J
    double ret = 0.0;        // sum of rewards
    double penalties = 0.0;  // sum of P1 (intermediate) and P2 (final)
    int violations = 0;      // constraint violations (P_theta events excluded)
    int p_theta_events = 0;
    std::vector<StepResult> steps;
    std::vector<EnvState> before;
};

/// Plays one episode with `policy` on an environment reset from `episode_seed`.
EpisodeOutcome play_episode(Env& env, Policy& policy, std::uint64_t episode_seed, bool keep_steps = false);

struct TrainOutput {
    nlohmann::json checkpoint;
    std::string metrics_csv;
    double wall_seconds = 0.0;
};

/// Trains `cfg.agent` for `cfg.train.steps` environment steps. Metrics rows are
/// written every `cfg.train.metrics_every` finished episodes.
TrainOutput run_train(const ExperimentConfig& cfg, std::uint64_t seed);

struct EvalSummary {
    std::string agent;
    std::string config_hash;
    std::uint64_t seed = 0;
    int episodes = 0;
    double mean_energy = 0.0;
    double std_energy = 0.0;
    double mean_return = 0.0;
    double violation_rate = 0.0;  // share of episodes with at least one constraint violation
    long violations = 0;
    std::vector<double> energies;
    std::vector<double> returns;

    nlohmann::json to_json() const;
};

/// Evaluates a checkpoint; refuses when the checkpoint was made under a different configuration.
EvalSummary run_eval(const ExperimentConfig& cfg, const nlohmann::json& checkpoint, std::uint64_t seed,
                     int episodes);

/// One JSON record per step of `episodes` evaluation episodes.
std::vector<nlohmann::json> orientation_trace(const ExperimentConfig& cfg, const nlohmann::json& checkpoint,
                                              std::uint64_t seed, int episodes);

struct SweepCell {
    SweepAxis axis = SweepAxis::elements;
    int value = 0;
    AgentKind scheme = AgentKind::sac;
    std::uint64_t seed = 0;
    EvalSummary summary;
    double train_seconds = 0.0;
};

/// Trains and evaluates every (axis value, scheme, seed) cell on `cfg.train.workers` threads.
std::vector<SweepCell> run_sweep_cells(const ExperimentConfig& cfg, SweepAxis axis);
std::string sweep_csv(const std::vector<SweepCell>& cells);

/// Solves `count` random power-control instances and tabulates the results.
std::string power_batch_csv(std::uint64_t seed, int count);

/// Solves the instances of a CSV with columns alpha_D, B_k, gain, noise, p_max,
/// tau (an optional header line is skipped).
std::string power_batch_from_csv(const std::string& text);

inline constexpr const char* kMetricsSchema = "# schema=rris-metrics/1";
inline constexpr const char* kSweepSchema = "# schema=rris-sweep/1";
inline constexpr const char* kPowerSchema = "# schema=rris-power/1";

} // namespace rris
