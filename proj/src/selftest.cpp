#include "rris/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "rris/compute.hpp"
#include "rris/config.hpp"
#include "rris/mlp.hpp"
#include "rris/powerctl.hpp"
#include "rris/runner.hpp"

namespace rris {

namespace {

bool local_plateau() {
    ExperimentConfig cfg;
    cfg.env.num_ues = 5;
    cfg.agent = AgentKind::local;
    cfg.train.steps = 8;
    const TrainOutput t = run_train(cfg, 1);
    const EvalSummary s = run_eval(cfg, t.checkpoint, 1, 3);
    return std::abs(s.mean_energy - 10.8) <= 1e-9 && s.std_energy == 0.0 && std::abs(s.mean_return + 10.8) <= 1e-9;
}

bool deadline_tightness() {
    Rng rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        TaskSpec t;
        t.size_bits = 1e6 + u(rng) * 2e7;
        t.cycles_per_bit = 100 + u(rng) * 1000;
        t.cycle_T = 1 + u(rng) * 20;
        t.slots_Q = 2 + static_cast<int>(u(rng) * 8);
        const double eta = 0.01 + 0.98 * u(rng);
        const double fl = optimal_local_freq(t, eta).hz;
        const double fe = optimal_edge_alloc(t, eta);
        if (std::abs(local_time_energy(t, eta, fl).seconds - t.cycle_T) > 1e-12 * t.cycle_T) return false;
        const double span = (t.slots_Q - 1) * t.slot_tau();
        if (std::abs(edge_time(t, eta, fe) - span) > 1e-12 * span) return false;
    }
    return true;
}

bool dinkelbach_grid() {
    Rng rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        PowerInstance inst;
        inst.alpha_d = 1e5 + u(rng) * 4.9e6;
        inst.bandwidth = 5e5 + u(rng) * 3.5e6;
        inst.channel_gain = std::pow(10.0, -12.0 + 4.0 * u(rng));
        inst.slot_tau = 0.5 + u(rng) * 2.5;
        inst.p_max = min_feasible_power(inst).watts * (1.5 + 20.0 * u(rng));
        const DinkelbachResult r = dinkelbach_solve(inst, {});
        const double lo = min_feasible_power(inst).watts;
        double best = offload_energy_at(inst, lo);
        for (int g = 0; g <= 10000; ++g) {
            best = std::min(best, offload_energy_at(inst, lo + (inst.p_max - lo) * g / 10000.0));
        }
        if (std::abs(offload_energy_at(inst, r.p_star) - best) > 1e-6 * best) return false;
        for (std::size_t k = 1; k < r.y_history.size(); ++k) {
            if (r.y_history[k] > r.y_history[k - 1]) return false;
        }
    }
    return true;
}

bool gradients() {
    Rng rng(3);
    for (int trial = 0; trial < 3; ++trial) {
        Mlp net = make_mlp(4, 6, 2, 3, trial == 1 ? Activation::relu : Activation::tanh);
        std::uniform_real_distribution<double> up(-1.0, 1.0);
        for (double& v : net.params()) v = up(rng);
        Matrix x = Matrix::Random(4, 5);
        Matrix w = Matrix::Random(3, 5);
        auto loss = [&](const Mlp& m) { return (m.forward(x).array() * w.array()).sum(); };
        Tape tape;
        net.forward(x, tape);
        ParamVector g(net.num_params(), 0.0);
        net.backward(tape, w, g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            Mlp p = net;
            Mlp m = net;
            p.params()[i] += 1e-5;
            m.params()[i] -= 1e-5;
            const double fd = (loss(p) - loss(m)) / 2e-5;
            if (std::abs(fd - g[i]) > 1e-4 * std::max(1.0, std::abs(fd))) return false;
        }
    }
    return true;
}

bool los_unit_modulus() {
    for (double d = 0.5; d < 200.0; d *= 1.7) {
        if (std::abs(std::abs(los_phasor(d, 0.0107)) - 1.0) > 1e-15) return false;
    }
    return true;
}

bool config_round_trip() {
    const ExperimentConfig a = parse_config("[scenario]\nnum_ues = 3\n[channel]\nnoise_power = -110 dBm\n");
    const std::string text = serialize_config(a);
    return serialize_config(parse_config(text)) == text;
}

bool determinism() {
    ExperimentConfig cfg;
    cfg.env.num_ues = 2;
    cfg.env.num_elements = 4;
    cfg.train.steps = 120;
    cfg.sac.warmup_steps = 40;
    cfg.sac.batch_size = 16;
    cfg.sac.hidden = 16;
    const TrainOutput a = run_train(cfg, 5);
    const TrainOutput b = run_train(cfg, 5);
    return a.metrics_csv == b.metrics_csv && a.checkpoint.dump() == b.checkpoint.dump();
}

} // namespace

bool run_selftest(std::ostream& out) {
    const std::pair<const char*, std::function<bool()>> checks[] = {
        {"local-only plateau", local_plateau},
        {"deadline tightness", deadline_tightness},
        {"dinkelbach vs grid", dinkelbach_grid},
        {"gradient fidelity", gradients},
        {"line-of-sight unit modulus", los_unit_modulus},
        {"config round-trip", config_round_trip},
        {"training determinism", determinism},
    };
    bool all = true;
    for (const auto& [name, fn] : checks) {
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            out << "ERROR " << name << ": " << e.what() << "\n";
        }
        out << (ok ? "PASS " : "FAIL ") << name << "\n";
        all = all && ok;
    }
    return all;
}

} // namespace rris
