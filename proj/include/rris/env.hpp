#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rris/channel.hpp"
#include "rris/compute.hpp"
#include "rris/powerctl.hpp"
#include "rris/scenario.hpp"

namespace rris {

enum class RotationMode { learned, fixed, random };
enum class PowerSolver { closed_form, dinkelbach };

std::string to_string(RotationMode m);
std::string to_string(PowerSolver s);
RotationMode parse_rotation_mode(const std::string& s);
PowerSolver parse_power_solver(const std::string& s);

struct EnvConfig {
    int num_ues = 12;
    int num_elements = 20;
    int phase_bits = 2;
    Position bs{0.0, 0.0, 0.0};
    RisPose ris;
    MobilityParams mobility;
    ChannelParams channel;
    RadiationParams radiation;
    TaskSpec task;
    double p_max = 0.1;          // W
    double f_edge_total = 1e10;  // Hz
    double penalty_w = 1.0;
    RotationMode rotation_mode = RotationMode::learned;
    PowerSolver power_solver = PowerSolver::closed_form;
    DinkelbachSettings dinkelbach;

    int action_dim() const { return 1 + num_elements + num_ues; }
    int obs_dim() const { return 3 * num_ues + 1; }
    int decision_steps() const { return task.slots_Q - 1; }
    ChannelParams channel_params() const;
    void validate() const;
};

/// The observation of one slot before normalisation.
struct EnvState {
    std::vector<double> distances;  // d_kR, m
    std::vector<double> angles;     // theta_k^0 (angle to the initial plane direction), rad
    std::vector<double> cum_alpha;  // offloaded share before this slot
    int slot_index = 1;             // 1 .. Q-1
};

struct EnvAction {
    double rotation = 0.0;
    PhaseConfig phases;
    std::vector<double> alphas;
};

struct RewardBreakdown {
    double offload_energy = 0.0;
    double local_energy = 0.0;  // final step only
    double p1 = 0.0;
    double p2 = 0.0;            // final step only (includes p1)
    double total = 0.0;
    int k_un = 0;
    double p_theta = 0.0;
    double resource_penalty = 0.0;
    int local_cap_violations = 0;

    /// Constraint violations (P_theta is a performance penalty, not a constraint).
    int violations() const { return k_un + local_cap_violations + (resource_penalty > 0.0 ? 1 : 0); }
    double penalties() const { return p2 > 0.0 ? p2 : p1; }
};

struct UeSlotInfo {
    double alpha = 0.0;
    double channel_gain = 0.0;  // |h_k|^2
    double p_hat = 0.0;
    double power = 0.0;
    double t_off = 0.0;
    double e_off = 0.0;
    bool violated = false;
    double e_loc = 0.0;   // final step only
    double f_loc = 0.0;   // final step only
    double f_edge = 0.0;  // final step only
};

struct StepResult {
    EnvState state;  // next state (unchanged slot index when done)
    RewardBreakdown reward;
    bool done = false;
    // What happened in the slot that was just played.
    int slot = 1;
    EnvAction action;
    AngleSet angles;
    std::vector<Position> positions;
    std::vector<UeSlotInfo> ues;
    double policy_metric = 0.0;
    double random_metric = 0.0;
};

class Env {
public:
    explicit Env(EnvConfig config);

    EnvState reset(std::uint64_t seed);

    /// Maps raw agent outputs in [-1,1]^(1+N+K) onto the action domains.
    EnvAction decode_action(std::span<const double> raw);

    StepResult step(const EnvAction& action);

    /// Normalised observation of the current state in [0,1] (cum_alpha may exceed 1 on violations).
    std::vector<double> observe() const;
    std::vector<double> observe(const EnvState& s) const;

    const EnvConfig& config() const { return config_; }
    const EnvState& state() const { return state_; }
    const MobilityState& mobility() const { return mobility_; }
    bool done() const { return done_; }
    double theta0_B() const { return theta0_B_; }
    Interval rotation_interval() const { return rotation_bounds(theta0_B_); }
    double fixed_rotation() const { return fixed_rotation_; }

private:
    EnvState make_state() const;
    double channel_metric(const FadingSample& fading, double rotation, const PhaseConfig& phases,
                          std::span<const double> alphas) const;

    EnvConfig config_;
    double theta0_B_ = 0.0;
    double fixed_rotation_ = 0.0;
    double dist_lo_ = 0.0;
    double dist_hi_ = 1.0;
    std::vector<double> codebook_;

    MobilityState mobility_;
    EnvState state_;
    bool done_ = true;
    Rng mobility_rng_;
    Rng fading_rng_;
    Rng compare_rng_;
    Rng rotation_rng_;
};

/// Rotation maximising the pattern product for a UE at the mobility-region centre.
double centroid_rotation(const EnvConfig& config);

/// Pattern product sin^z(theta_k) sin^z(theta_B) for a UE at `ue` under `rotation`.
double pattern_at(const EnvConfig& config, const Position& ue, double rotation);

/// Sum of E_loc + E_off over UEs in one step.
double step_energy(const StepResult& r);

/// One JSON-lines trajectory record.
nlohmann::json step_record_json(const StepResult& r, int episode, const EnvState& before);

} // namespace rris
