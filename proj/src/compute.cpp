#include "rris/compute.hpp"

#include <algorithm>
#include <numeric>

#include "rris/error.hpp"

namespace rris {

void TaskSpec::validate() const {
    const bool ok = size_bits > 0 && cycles_per_bit > 0 && capacitance > 0 && f_loc_max > 0 && cycle_T > 0 &&
                    slots_Q >= 2;
    if (!ok) throw InvalidArgument("task parameters must be positive and Q >= 2");
}

double offload_time(double alpha, const TaskSpec& task, double rate) {
    if (alpha == 0.0) return 0.0;
    if (rate <= 0.0) throw Infeasible("cannot offload with zero rate");
    return alpha * task.size_bits / rate;
}

double offload_energy(double t_off, double power) {
    if (t_off < 0.0 || power < 0.0) throw InvalidArgument("offload time and power must be >= 0");
    return t_off * power;
}

double edge_time(const TaskSpec& task, double eta, double f_edge) {
    if (eta == 0.0) return 0.0;
    if (f_edge <= 0.0) throw Infeasible("offloaded work with no edge resource");
    return task.total_cycles() * eta / f_edge;
}

TimeEnergy local_time_energy(const TaskSpec& task, double eta, double f_loc) {
    const double local_cycles = task.total_cycles() * (1.0 - eta);
    if (local_cycles == 0.0) return {};
    if (f_loc <= 0.0) throw Infeasible("local work with zero CPU frequency");
    return {local_cycles / f_loc, task.capacitance * f_loc * f_loc * local_cycles};
}

FrequencyChoice optimal_local_freq(const TaskSpec& task, double eta) {
    if (eta < 0.0 || eta > 1.0) throw InvalidArgument("eta must lie in [0,1]");
    const double f = task.total_cycles() * (1.0 - eta) / task.cycle_T;
    return {f, f > task.f_loc_max};
}

double optimal_edge_alloc(const TaskSpec& task, double eta) {
    if (task.slots_Q < 2) throw InvalidArgument("edge allocation needs Q >= 2");
    return task.total_cycles() * eta / ((task.slots_Q - 1) * task.slot_tau());
}

double edge_oversubscription(std::span<const double> f_edge, double f_edge_total) {
    const double sum = std::accumulate(f_edge.begin(), f_edge.end(), 0.0);
    return std::max(0.0, sum - f_edge_total);
}

} // namespace rris
