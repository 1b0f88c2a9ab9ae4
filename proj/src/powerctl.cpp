#include "rris/powerctl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rris/error.hpp"

namespace rris {

void PowerInstance::validate() const {
    const bool ok = alpha_d >= 0 && bandwidth > 0 && channel_gain >= 0 && noise > 0 && p_max > 0 && slot_tau > 0;
    if (!ok) throw InvalidArgument("invalid power instance");
}

PowerBound min_feasible_power(const PowerInstance& inst) {
    inst.validate();
    if (inst.alpha_d == 0.0) return {};
    if (inst.channel_gain == 0.0) {
        return {std::numeric_limits<double>::infinity(), true, true};
    }
    const double spectral = inst.alpha_d / (inst.slot_tau * inst.bandwidth);
    const double p = inst.noise * std::expm1(spectral * std::numbers::ln2) / inst.channel_gain;
    return {p, p > inst.p_max, false};
}

double offload_energy_at(const PowerInstance& inst, double power) {
    if (inst.alpha_d == 0.0) return 0.0;
    const double x = inst.channel_gain / inst.noise;
    if (power == 0.0) {
        // lim_{p->0} p / log2(1 + p x) = ln2 / x
        return inst.alpha_d * std::numbers::ln2 / (inst.bandwidth * x);
    }
    const double bits_per_hz = std::log1p(power * x) / std::numbers::ln2;
    return inst.alpha_d * power / (inst.bandwidth * bits_per_hz);
}

DinkelbachResult dinkelbach_solve(const PowerInstance& inst, const DinkelbachSettings& settings) {
    if (!(settings.tol > 0.0) || settings.max_iter < 1) throw InvalidArgument("invalid Dinkelbach settings");
    const PowerBound bound = min_feasible_power(inst);
    DinkelbachResult res;
    if (inst.alpha_d == 0.0) return res;
    if (bound.no_channel || bound.exceeds_pmax) {
        throw Infeasible("minimum feasible power exceeds p_max");
    }

    const double lo = bound.watts;
    const double hi = inst.p_max;
    const double inv_snr = inst.noise / inst.channel_gain;
    const double slope = inst.bandwidth / (std::numbers::ln2 * inst.alpha_d);

    double p = hi;
    double y = offload_energy_at(inst, p);
    res.y_history.push_back(y);
    res.converged = false;
    for (int t = 1; t <= settings.max_iter; ++t) {
        res.iterations = t;
        // argmin_p alpha_d p - y B log2(1 + p g / sigma^2) over [lo, hi]
        const double p_next = std::clamp(y * slope - inv_snr, lo, hi);
        const double y_next = offload_energy_at(inst, p_next);
        if (y_next >= y) {
            // No further decrease, only round-off left.
            res.converged = true;
            break;
        }
        const bool small = (y - y_next) <= settings.tol * y;
        p = p_next;
        y = y_next;
        res.y_history.push_back(y);
        if (small) {
            res.converged = true;
            break;
        }
    }
    res.p_star = p;
    res.y_star = y;
    return res;
}

} // namespace rris
