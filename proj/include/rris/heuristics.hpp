#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rris/env.hpp"

namespace rris {

enum class HeuristicKind { fixed_orientation, random_orientation, local_only, random_phase };

std::string to_string(HeuristicKind k);
HeuristicKind parse_heuristic(const std::string& s);

/// Raw value in [-1,1] that the environment decodes to `rotation` in learned mode.
double rotation_to_raw(const Interval& bounds, double rotation);

/// Non-learning policies that emit raw actions for an environment in learned
/// rotation mode.
///  - fixed_orientation holds the rotation that maximises the pattern product at
///    the region centre;
///  - random_orientation draws the rotation uniformly from its interval;
///  - random_phase draws every phase index uniformly;
///  - local_only never offloads.
/// Except for local_only, every UE offloads `offload_share` of its task, spread
/// evenly over the decision slots.
class HeuristicPolicy {
public:
    HeuristicPolicy(HeuristicKind kind, const EnvConfig& config, std::uint64_t seed, double offload_share = 0.0);

    std::vector<double> act(const Env& env);

    HeuristicKind kind() const { return kind_; }
    double rotation() const { return rotation_; }

private:
    HeuristicKind kind_;
    int num_elements_;
    int num_ues_;
    int levels_;
    double alpha_raw_;
    double rotation_;
    Rng rng_;
};

} // namespace rris
