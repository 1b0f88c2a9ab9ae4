#pragma once

#include <span>

namespace rris {

/// Per-UE task and the task-cycle timing. SI units throughout.
struct TaskSpec {
    double size_bits = 1e7;        // D_k
    double cycles_per_bit = 600;   // C_k
    double capacitance = 1e-27;    // c_k^loc
    double f_loc_max = 6e8;        // Hz
    double cycle_T = 10.0;         // s
    int slots_Q = 5;

    double slot_tau() const { return cycle_T / slots_Q; }
    double total_cycles() const { return size_bits * cycles_per_bit; }
    void validate() const;
};

struct TimeEnergy {
    double seconds = 0.0;
    double joules = 0.0;
};

/// A closed-form frequency together with whether it breaks its cap. The value
/// is never clamped: the reward needs to see the violation.
struct FrequencyChoice {
    double hz = 0.0;
    bool exceeds_cap = false;
};

double offload_time(double alpha, const TaskSpec& task, double rate);
double offload_energy(double t_off, double power);
double edge_time(const TaskSpec& task, double eta, double f_edge);
TimeEnergy local_time_energy(const TaskSpec& task, double eta, double f_loc);

/// Slowest local clock that still finishes the local share within T.
FrequencyChoice optimal_local_freq(const TaskSpec& task, double eta);

/// Edge clock that finishes the offloaded share within the Q-1 slots after the first.
double optimal_edge_alloc(const TaskSpec& task, double eta);

/// max(0, sum(f_edge) - f_total), in Hz.
double edge_oversubscription(std::span<const double> f_edge, double f_edge_total);

} // namespace rris
