#include "rris/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rris/error.hpp"

namespace rris {

std::string to_string(AgentKind k) {
    switch (k) {
        case AgentKind::sac: return "sac";
        case AgentKind::ppo: return "ppo";
        case AgentKind::local: return "local";
        case AgentKind::fixed: return "fixed";
        case AgentKind::random: return "random";
    }
    return "sac";
}

AgentKind parse_agent(const std::string& s) {
    if (s == "sac") return AgentKind::sac;
    if (s == "ppo") return AgentKind::ppo;
    if (s == "local") return AgentKind::local;
    if (s == "fixed") return AgentKind::fixed;
    if (s == "random") return AgentKind::random;
    throw InvalidArgument("unknown agent '" + s + "' (expected sac, ppo, local, fixed or random)");
}

std::string to_string(SweepAxis a) { return a == SweepAxis::elements ? "N" : "K"; }

SweepAxis parse_axis(const std::string& s) {
    if (s == "N") return SweepAxis::elements;
    if (s == "K") return SweepAxis::ues;
    throw InvalidArgument("unknown sweep axis '" + s + "' (expected N or K)");
}

namespace {

enum class Unit { none, power, ratio, frequency, bits, time, length };

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_number(const std::string& text, std::string& rest) {
    const std::string t = trim(text);
    double v = 0.0;
    const char* first = t.data();
    if (!t.empty() && t.front() == '+') ++first;
    const auto res = std::from_chars(first, t.data() + t.size(), v);
    if (res.ec != std::errc{} || !std::isfinite(v)) throw InvalidArgument("'" + t + "' is not a number");
    rest = trim(std::string(res.ptr, t.data() + t.size()));
    return v;
}

double parse_quantity(const std::string& text, Unit unit) {
    std::string u;
    const double x = parse_number(text, u);
    auto bad = [&]() -> double {
        throw InvalidArgument("unit '" + u + "' does not fit this key");
    };
    switch (unit) {
        case Unit::none:
            if (!u.empty()) return bad();
            return x;
        case Unit::power:
            if (u.empty() || u == "W") return x;
            if (u == "mW") return x * 1e-3;
            if (u == "dBm") return std::pow(10.0, (x - 30.0) / 10.0);
            if (u == "dBW") return std::pow(10.0, x / 10.0);
            return bad();
        case Unit::ratio:
            if (u.empty()) return x;
            if (u == "dB") return std::pow(10.0, x / 10.0);
            return bad();
        case Unit::frequency:
            if (u.empty() || u == "Hz") return x;
            if (u == "kHz") return x * 1e3;
            if (u == "MHz") return x * 1e6;
            if (u == "GHz") return x * 1e9;
            return bad();
        case Unit::bits:
            if (u.empty() || u == "b") return x;
            if (u == "kb") return x * 1e3;
            if (u == "Mb") return x * 1e6;
            if (u == "Gb") return x * 1e9;
            return bad();
        case Unit::time:
            if (u.empty() || u == "s") return x;
            if (u == "ms") return x * 1e-3;
            return bad();
        case Unit::length:
            if (u.empty() || u == "m") return x;
            return bad();
    }
    return x;
}

std::string format_quantity(double v, Unit unit) {
    switch (unit) {
        case Unit::power: return fmt(v) + " W";
        case Unit::frequency: return fmt(v) + " Hz";
        case Unit::bits: return fmt(v) + " b";
        case Unit::time: return fmt(v) + " s";
        case Unit::length: return fmt(v) + " m";
        default: return fmt(v);
    }
}

long parse_integer(const std::string& text) {
    const std::string t = trim(text);
    long v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw InvalidArgument("'" + t + "' is not an integer");
    }
    return v;
}

bool parse_bool(const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw InvalidArgument("'" + t + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string t = text;
    for (char& c : t) {
        if (c == ',') c = ' ';
    }
    std::istringstream is(t);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::vector<double> parse_vector(const std::string& text, std::size_t n, Unit unit) {
    const auto parts = split_list(text);
    if (parts.size() != n) throw InvalidArgument("expected " + std::to_string(n) + " components");
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(parse_quantity(p, unit == Unit::length ? Unit::none : unit));
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F f) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += f(v[i]);
    }
    return s;
}

struct Key {
    std::string section;
    std::string name;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Ref>
Key qkey(std::string sec, std::string name, Unit unit, Ref ref) {
    return {std::move(sec), std::move(name),
            [unit, ref](ExperimentConfig& c, const std::string& v) { ref(c) = parse_quantity(v, unit); },
            [unit, ref](const ExperimentConfig& c) {
                return format_quantity(ref(const_cast<ExperimentConfig&>(c)), unit);
            }};
}

template <typename Ref>
Key ikey(std::string sec, std::string name, Ref ref) {
    return {std::move(sec), std::move(name),
            [ref](ExperimentConfig& c, const std::string& v) {
                using T = std::remove_reference_t<decltype(ref(c))>;
                ref(c) = static_cast<T>(parse_integer(v));
            },
            [ref](const ExperimentConfig& c) { return std::to_string(ref(const_cast<ExperimentConfig&>(c))); }};
}

template <typename Ref>
Key bkey(std::string sec, std::string name, Ref ref) {
    return {std::move(sec), std::move(name),
            [ref](ExperimentConfig& c, const std::string& v) { ref(c) = parse_bool(v); },
            [ref](const ExperimentConfig& c) {
                return std::string(ref(const_cast<ExperimentConfig&>(c)) ? "true" : "false");
            }};
}

Key position_key(std::string sec, std::string name, Position& (*ref)(ExperimentConfig&)) {
    return {std::move(sec), std::move(name),
            [ref](ExperimentConfig& c, const std::string& v) {
                const auto p = parse_vector(v, 3, Unit::length);
                ref(c) = Position{p[0], p[1], p[2]};
            },
            [ref](const ExperimentConfig& c) {
                const Position& p = ref(const_cast<ExperimentConfig&>(c));
                return fmt(p.x) + ", " + fmt(p.y) + ", " + fmt(p.z);
            }};
}

const std::vector<Key>& keys() {
    using C = ExperimentConfig;
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        // scenario
        k.push_back(ikey("scenario", "num_ues", [](C& c) -> int& { return c.env.num_ues; }));
        k.push_back(ikey("scenario", "num_elements", [](C& c) -> int& { return c.env.num_elements; }));
        k.push_back(ikey("scenario", "phase_bits", [](C& c) -> int& { return c.env.phase_bits; }));
        k.push_back(position_key("scenario", "bs_position", [](C& c) -> Position& { return c.env.bs; }));
        k.push_back(position_key("scenario", "ris_position", [](C& c) -> Position& { return c.env.ris.position; }));
        k.push_back({"scenario", "ris_plane_direction",
                     [](C& c, const std::string& v) {
                         const auto p = parse_vector(v, 2, Unit::none);
                         c.env.ris.initial_plane_direction = Vec2{p[0], p[1]};
                     },
                     [](const C& c) {
                         return fmt(c.env.ris.initial_plane_direction.x) + ", " +
                                fmt(c.env.ris.initial_plane_direction.y);
                     }});
        k.push_back(
            position_key("scenario", "region_center", [](C& c) -> Position& { return c.env.mobility.region_center; }));
        k.push_back(qkey("scenario", "region_radius", Unit::length,
                         [](C& c) -> double& { return c.env.mobility.region_radius; }));
        k.push_back(
            qkey("scenario", "mobility_memory", Unit::none, [](C& c) -> double& { return c.env.mobility.memory; }));
        k.push_back(
            qkey("scenario", "mean_speed", Unit::none, [](C& c) -> double& { return c.env.mobility.mean_speed; }));
        k.push_back(
            qkey("scenario", "speed_std", Unit::none, [](C& c) -> double& { return c.env.mobility.speed_std; }));
        k.push_back({"scenario", "rotation_mode",
                     [](C& c, const std::string& v) { c.env.rotation_mode = parse_rotation_mode(trim(v)); },
                     [](const C& c) { return to_string(c.env.rotation_mode); }});
        // channel
        k.push_back(qkey("channel", "rho0", Unit::ratio, [](C& c) -> double& { return c.env.channel.rho0; }));
        k.push_back(qkey("channel", "alpha_ue_ris", Unit::none, [](C& c) -> double& { return c.env.channel.alpha1; }));
        k.push_back(qkey("channel", "alpha_ris_bs", Unit::none, [](C& c) -> double& { return c.env.channel.alpha2; }));
        k.push_back(qkey("channel", "rician_ue_ris", Unit::ratio, [](C& c) -> double& { return c.env.channel.k1; }));
        k.push_back(qkey("channel", "rician_ris_bs", Unit::ratio, [](C& c) -> double& { return c.env.channel.k2; }));
        k.push_back(
            qkey("channel", "wavelength", Unit::length, [](C& c) -> double& { return c.env.channel.wavelength; }));
        k.push_back(
            qkey("channel", "noise_power", Unit::power, [](C& c) -> double& { return c.env.channel.noise_power; }));
        k.push_back(qkey("channel", "bandwidth", Unit::frequency,
                         [](C& c) -> double& { return c.env.channel.total_bandwidth; }));
        k.push_back(qkey("channel", "direct_exponent", Unit::none,
                         [](C& c) -> double& { return c.env.channel.direct_exponent; }));
        k.push_back(qkey("channel", "direct_attenuation", Unit::ratio,
                         [](C& c) -> double& { return c.env.channel.direct_attenuation; }));
        k.push_back(qkey("channel", "pattern_exponent", Unit::none, [](C& c) -> double& { return c.env.radiation.z; }));
        k.push_back(qkey("channel", "element_gain", Unit::ratio, [](C& c) -> double& { return c.env.radiation.dm; }));
        // compute
        k.push_back(qkey("compute", "task_size", Unit::bits, [](C& c) -> double& { return c.env.task.size_bits; }));
        k.push_back(
            qkey("compute", "cycles_per_bit", Unit::none, [](C& c) -> double& { return c.env.task.cycles_per_bit; }));
        k.push_back(
            qkey("compute", "capacitance", Unit::none, [](C& c) -> double& { return c.env.task.capacitance; }));
        k.push_back(
            qkey("compute", "f_loc_max", Unit::frequency, [](C& c) -> double& { return c.env.task.f_loc_max; }));
        k.push_back(
            qkey("compute", "f_edge_total", Unit::frequency, [](C& c) -> double& { return c.env.f_edge_total; }));
        k.push_back(qkey("compute", "cycle_T", Unit::time, [](C& c) -> double& { return c.env.task.cycle_T; }));
        k.push_back(ikey("compute", "slots_Q", [](C& c) -> int& { return c.env.task.slots_Q; }));
        k.push_back(qkey("compute", "p_max", Unit::power, [](C& c) -> double& { return c.env.p_max; }));
        k.push_back({"compute", "power_solver",
                     [](C& c, const std::string& v) { c.env.power_solver = parse_power_solver(trim(v)); },
                     [](const C& c) { return to_string(c.env.power_solver); }});
        k.push_back(
            qkey("compute", "dinkelbach_tol", Unit::none, [](C& c) -> double& { return c.env.dinkelbach.tol; }));
        k.push_back(ikey("compute", "dinkelbach_max_iter", [](C& c) -> int& { return c.env.dinkelbach.max_iter; }));
        // penalty
        k.push_back(qkey("penalty", "weight", Unit::none, [](C& c) -> double& { return c.env.penalty_w; }));
        // agent
        k.push_back({"agent", "kind", [](C& c, const std::string& v) { c.agent = parse_agent(trim(v)); },
                     [](const C& c) { return to_string(c.agent); }});
        // sac
        k.push_back(qkey("sac", "gamma", Unit::none, [](C& c) -> double& { return c.sac.gamma; }));
        k.push_back(qkey("sac", "temperature", Unit::none, [](C& c) -> double& { return c.sac.temperature; }));
        k.push_back(bkey("sac", "auto_temperature", [](C& c) -> bool& { return c.sac.auto_temperature; }));
        k.push_back(qkey("sac", "target_entropy", Unit::none, [](C& c) -> double& { return c.sac.target_entropy; }));
        k.push_back(qkey("sac", "polyak", Unit::none, [](C& c) -> double& { return c.sac.polyak; }));
        k.push_back(qkey("sac", "lr_actor", Unit::none, [](C& c) -> double& { return c.sac.lr_actor; }));
        k.push_back(qkey("sac", "lr_critic", Unit::none, [](C& c) -> double& { return c.sac.lr_critic; }));
        k.push_back(qkey("sac", "lr_temperature", Unit::none, [](C& c) -> double& { return c.sac.lr_temperature; }));
        k.push_back(ikey("sac", "batch_size", [](C& c) -> int& { return c.sac.batch_size; }));
        k.push_back(ikey("sac", "buffer_size", [](C& c) -> int& { return c.sac.buffer_size; }));
        k.push_back(ikey("sac", "warmup_steps", [](C& c) -> int& { return c.sac.warmup_steps; }));
        k.push_back(ikey("sac", "hidden", [](C& c) -> int& { return c.sac.hidden; }));
        k.push_back(ikey("sac", "layers", [](C& c) -> int& { return c.sac.layers; }));
        k.push_back(ikey("sac", "update_every", [](C& c) -> int& { return c.sac.update_every; }));
        k.push_back({"sac", "activation",
                     [](C& c, const std::string& v) { c.sac.activation = parse_activation(trim(v)); },
                     [](const C& c) { return to_string(c.sac.activation); }});
        k.push_back(qkey("sac", "log_std_min", Unit::none, [](C& c) -> double& { return c.sac.head.log_std_min; }));
        k.push_back(qkey("sac", "log_std_max", Unit::none, [](C& c) -> double& { return c.sac.head.log_std_max; }));
        // ppo
        k.push_back(qkey("ppo", "gamma", Unit::none, [](C& c) -> double& { return c.ppo.gamma; }));
        k.push_back(qkey("ppo", "gae_lambda", Unit::none, [](C& c) -> double& { return c.ppo.gae_lambda; }));
        k.push_back(qkey("ppo", "clip", Unit::none, [](C& c) -> double& { return c.ppo.clip; }));
        k.push_back(qkey("ppo", "lr_actor", Unit::none, [](C& c) -> double& { return c.ppo.lr_actor; }));
        k.push_back(qkey("ppo", "lr_critic", Unit::none, [](C& c) -> double& { return c.ppo.lr_critic; }));
        k.push_back(qkey("ppo", "entropy_coef", Unit::none, [](C& c) -> double& { return c.ppo.entropy_coef; }));
        k.push_back(ikey("ppo", "epochs", [](C& c) -> int& { return c.ppo.epochs; }));
        k.push_back(ikey("ppo", "minibatch", [](C& c) -> int& { return c.ppo.minibatch; }));
        k.push_back(ikey("ppo", "rollout_steps", [](C& c) -> int& { return c.ppo.rollout_steps; }));
        k.push_back(ikey("ppo", "hidden", [](C& c) -> int& { return c.ppo.hidden; }));
        k.push_back(ikey("ppo", "layers", [](C& c) -> int& { return c.ppo.layers; }));
        k.push_back(qkey("ppo", "init_log_std", Unit::none, [](C& c) -> double& { return c.ppo.init_log_std; }));
        k.push_back(bkey("ppo", "normalize_advantages", [](C& c) -> bool& { return c.ppo.normalize_advantages; }));
        k.push_back({"ppo", "activation",
                     [](C& c, const std::string& v) { c.ppo.activation = parse_activation(trim(v)); },
                     [](const C& c) { return to_string(c.ppo.activation); }});
        // train
        k.push_back(ikey("train", "steps", [](C& c) -> long& { return c.train.steps; }));
        k.push_back(ikey("train", "eval_episodes", [](C& c) -> int& { return c.train.eval_episodes; }));
        k.push_back(ikey("train", "metrics_every", [](C& c) -> int& { return c.train.metrics_every; }));
        k.push_back({"train", "seeds",
                     [](C& c, const std::string& v) {
                         c.train.seeds.clear();
                         for (const auto& s : split_list(v)) {
                             const long x = parse_integer(s);
                             if (x < 0) throw InvalidArgument("seeds must be non-negative");
                             c.train.seeds.push_back(static_cast<std::uint64_t>(x));
                         }
                     },
                     [](const C& c) {
                         return join(c.train.seeds, [](std::uint64_t s) { return std::to_string(s); });
                     }});
        k.push_back(ikey("train", "workers", [](C& c) -> int& { return c.train.workers; }));
        k.push_back(qkey("train", "offload_share", Unit::none, [](C& c) -> double& { return c.train.offload_share; }));
        // sweep
        k.push_back({"sweep", "axis", [](C& c, const std::string& v) { c.sweep.axis = parse_axis(trim(v)); },
                     [](const C& c) { return to_string(c.sweep.axis); }});
        auto int_list = [](std::vector<int>& (*ref)(C&)) {
            return std::make_pair(
                [ref](C& c, const std::string& v) {
                    ref(c).clear();
                    for (const auto& s : split_list(v)) ref(c).push_back(static_cast<int>(parse_integer(s)));
                },
                [ref](const C& c) {
                    return join(ref(const_cast<C&>(c)), [](int x) { return std::to_string(x); });
                });
        };
        {
            auto [s, g] = int_list([](C& c) -> std::vector<int>& { return c.sweep.elements; });
            k.push_back({"sweep", "elements", s, g});
        }
        {
            auto [s, g] = int_list([](C& c) -> std::vector<int>& { return c.sweep.ues; });
            k.push_back({"sweep", "ues", s, g});
        }
        k.push_back({"sweep", "schemes",
                     [](C& c, const std::string& v) {
                         c.sweep.schemes.clear();
                         for (const auto& s : split_list(v)) c.sweep.schemes.push_back(parse_agent(s));
                     },
                     [](const C& c) {
                         return join(c.sweep.schemes, [](AgentKind a) { return to_string(a); });
                     }});
        return k;
    }();
    return table;
}

const char* kSectionOrder[] = {"scenario", "channel", "compute", "penalty", "agent", "sac", "ppo", "train", "sweep"};

std::string serialize_sections(const ExperimentConfig& cfg, bool include_runs) {
    std::string out;
    for (const char* sec : kSectionOrder) {
        const std::string s = sec;
        if (!include_runs && (s == "agent" || s == "train" || s == "sweep")) continue;
        if (!out.empty()) out += "\n";
        out += "[" + s + "]\n";
        for (const auto& k : keys()) {
            if (k.section == s) out += k.name + " = " + k.get(cfg) + "\n";
        }
    }
    return out;
}

} // namespace

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& path, const std::string& what) { throw ConfigError(path, what); };
    if (env.num_ues < 1) fail("scenario.num_ues", "must be >= 1");
    if (env.num_elements < 1) fail("scenario.num_elements", "must be >= 1");
    if (env.phase_bits < 1 || env.phase_bits > 16) fail("scenario.phase_bits", "must lie in [1,16]");
    if (!(env.mobility.region_radius > 0.0)) fail("scenario.region_radius", "must be > 0");
    if (env.task.slots_Q < 2) fail("compute.slots_Q", "must be >= 2");
    if (!(env.p_max > 0.0)) fail("compute.p_max", "must be > 0");
    if (!(env.f_edge_total > 0.0)) fail("compute.f_edge_total", "must be > 0");
    if (!(env.penalty_w > 0.0)) fail("penalty.weight", "must be > 0");
    try {
        env.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail("scenario", e.what());
    }
    if (!(sac.gamma > 0.0 && sac.gamma <= 1.0)) fail("sac.gamma", "must lie in (0,1]");
    if (!(sac.temperature > 0.0)) fail("sac.temperature", "must be > 0");
    if (!(sac.polyak > 0.0 && sac.polyak < 1.0)) fail("sac.polyak", "must lie in (0,1)");
    if (!(sac.lr_actor > 0.0)) fail("sac.lr_actor", "must be > 0");
    if (!(sac.lr_critic > 0.0)) fail("sac.lr_critic", "must be > 0");
    if (!(sac.lr_temperature > 0.0)) fail("sac.lr_temperature", "must be > 0");
    if (sac.batch_size < 1) fail("sac.batch_size", "must be >= 1");
    if (sac.buffer_size < 1) fail("sac.buffer_size", "must be >= 1");
    if (sac.warmup_steps < 0) fail("sac.warmup_steps", "must be >= 0");
    if (sac.hidden < 1) fail("sac.hidden", "must be >= 1");
    if (sac.layers < 0) fail("sac.layers", "must be >= 0");
    if (sac.update_every < 1) fail("sac.update_every", "must be >= 1");
    if (!(sac.head.log_std_min < sac.head.log_std_max)) fail("sac.log_std_min", "must be below log_std_max");
    if (!(ppo.gamma > 0.0 && ppo.gamma <= 1.0)) fail("ppo.gamma", "must lie in (0,1]");
    if (!(ppo.gae_lambda >= 0.0 && ppo.gae_lambda <= 1.0)) fail("ppo.gae_lambda", "must lie in [0,1]");
    if (!(ppo.clip > 0.0)) fail("ppo.clip", "must be > 0");
    if (ppo.epochs < 1) fail("ppo.epochs", "must be >= 1");
    if (ppo.minibatch < 1) fail("ppo.minibatch", "must be >= 1");
    if (ppo.rollout_steps < 1) fail("ppo.rollout_steps", "must be >= 1");
    if (ppo.hidden < 1) fail("ppo.hidden", "must be >= 1");
    if (train.steps < 0) fail("train.steps", "must be >= 0");
    if (train.eval_episodes < 1) fail("train.eval_episodes", "must be >= 1");
    if (train.metrics_every < 1) fail("train.metrics_every", "must be >= 1");
    if (train.seeds.empty()) fail("train.seeds", "needs at least one seed");
    if (train.workers < 1) fail("train.workers", "must be >= 1");
    if (!(train.offload_share >= 0.0 && train.offload_share <= 1.0)) fail("train.offload_share", "must lie in [0,1]");
    for (int n : sweep.elements) {
        if (n < 1) fail("sweep.elements", "values must be positive");
    }
    for (int k : sweep.ues) {
        if (k < 1) fail("sweep.ues", "values must be positive");
    }
    if (sweep.schemes.empty()) fail("sweep.schemes", "needs at least one scheme");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::map<std::string, const Key*> index;
    std::map<std::string, bool> sections;
    for (const auto& k : keys()) {
        index[k.section + "." + k.name] = &k;
        sections[k.section] = true;
    }
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::map<std::string, int> seen;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno), "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!sections.count(section)) throw ConfigError(section, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string path = section.empty() ? key : section + "." + key;
        if (section.empty()) throw ConfigError(path, "key outside of a section");
        const auto it = index.find(path);
        if (it == index.end()) throw ConfigError(path, "unknown key");
        if (seen[path]++) throw ConfigError(path, "duplicate key");
        try {
            it->second->set(cfg, value);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(path, e.what());
        }
    }
    cfg.env.channel.num_ues = cfg.env.num_ues;
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) { return serialize_sections(cfg, true); }

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string text = serialize_sections(cfg, false);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace rris
