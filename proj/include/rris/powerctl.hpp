#pragma once

#include <vector>

namespace rris {

/// One UE-slot transmit-power subproblem.
struct PowerInstance {
    double alpha_d = 0.0;       // bits offloaded in this slot
    double bandwidth = 1e6;     // Hz
    double channel_gain = 1.0;  // |h|^2
    double noise = 1e-14;       // W
    double p_max = 0.1;         // W
    double slot_tau = 2.0;      // s

    void validate() const;
};

struct DinkelbachSettings {
    double tol = 1e-8;
    int max_iter = 50;
};

struct PowerBound {
    double watts = 0.0;
    bool exceeds_pmax = false;
    bool no_channel = false;  // alpha_d > 0 but |h|^2 == 0
};

struct DinkelbachResult {
    double p_star = 0.0;
    double y_star = 0.0;
    int iterations = 0;
    bool converged = true;
    std::vector<double> y_history;  // y^1, y^2, ... (non-increasing)
};

/// Smallest power that moves alpha_d bits within one slot.
PowerBound min_feasible_power(const PowerInstance& inst);

/// alpha_d * p / (B log2(1 + p g / sigma^2)); the p -> 0 limit when p == 0.
double offload_energy_at(const PowerInstance& inst, double power);

/// Dinkelbach iteration on [p_hat, p_max]. The inner problem is solved by its
/// clamped stationary point. Throws Infeasible when p_hat > p_max.
DinkelbachResult dinkelbach_solve(const PowerInstance& inst, const DinkelbachSettings& settings = {});

} // namespace rris
