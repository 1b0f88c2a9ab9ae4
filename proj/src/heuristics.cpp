#include "rris/heuristics.hpp"

#include <algorithm>

#include "rris/error.hpp"

namespace rris {

std::string to_string(HeuristicKind k) {
    switch (k) {
        case HeuristicKind::fixed_orientation: return "fixed-orientation";
        case HeuristicKind::random_orientation: return "random-orientation";
        case HeuristicKind::local_only: return "local-only";
        case HeuristicKind::random_phase: return "random-phase";
    }
    return "local-only";
}

HeuristicKind parse_heuristic(const std::string& s) {
    if (s == "fixed-orientation") return HeuristicKind::fixed_orientation;
    if (s == "random-orientation") return HeuristicKind::random_orientation;
    if (s == "local-only") return HeuristicKind::local_only;
    if (s == "random-phase") return HeuristicKind::random_phase;
    throw InvalidArgument("unknown heuristic '" + s + "'");
}

double rotation_to_raw(const Interval& bounds, double rotation) {
    if (!(bounds.width() > 0.0)) throw InvalidArgument("empty rotation interval");
    return std::clamp(2.0 * (rotation - bounds.lo) / bounds.width() - 1.0, -1.0, 1.0);
}

HeuristicPolicy::HeuristicPolicy(HeuristicKind kind, const EnvConfig& config, std::uint64_t seed,
                                 double offload_share)
    : kind_(kind), num_elements_(config.num_elements), num_ues_(config.num_ues),
      levels_(1 << config.phase_bits), rng_(seed) {
    if (!(offload_share >= 0.0 && offload_share <= 1.0)) throw InvalidArgument("offload_share must lie in [0,1]");
    const double per_slot = kind == HeuristicKind::local_only ? 0.0 : offload_share / config.decision_steps();
    alpha_raw_ = 2.0 * per_slot - 1.0;
    rotation_ = centroid_rotation(config);
}

std::vector<double> HeuristicPolicy::act(const Env& env) {
    std::vector<double> raw(static_cast<std::size_t>(1 + num_elements_ + num_ues_), 0.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    switch (kind_) {
        case HeuristicKind::fixed_orientation:
        case HeuristicKind::local_only: raw[0] = rotation_to_raw(env.rotation_interval(), rotation_); break;
        case HeuristicKind::random_orientation: raw[0] = u(rng_); break;
        case HeuristicKind::random_phase:
            raw[0] = rotation_to_raw(env.rotation_interval(), rotation_);
            // draw the codebook index itself; uniform raw values would favour the inner levels
            for (int n = 0; n < num_elements_; ++n) {
                std::uniform_int_distribution<int> idx(0, levels_ - 1);
                raw[1 + static_cast<std::size_t>(n)] = 2.0 * idx(rng_) / (levels_ - 1) - 1.0;
            }
            break;
    }
    for (int k = 0; k < num_ues_; ++k) raw[1 + static_cast<std::size_t>(num_elements_ + k)] = alpha_raw_;
    return raw;
}

} // namespace rris
