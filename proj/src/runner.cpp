#include "rris/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "rris/error.hpp"
#include "rris/heuristics.hpp"
#include "rris/powerctl.hpp"

namespace rris {

namespace {

enum Purpose : std::uint64_t { kAgent = 1, kTrainEpisode = 2, kEvalEpisode = 3, kExplore = 4, kHeuristic = 5 };

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

class SacPolicy : public Policy {
public:
    explicit SacPolicy(SacAgent agent) : agent_(std::move(agent)) {}
    std::vector<double> act(const Env&, const std::vector<double>& obs) override {
        return agent_.act(obs, true).action;
    }

private:
    SacAgent agent_;
};

class PpoPolicy : public Policy {
public:
    explicit PpoPolicy(PpoAgent agent) : agent_(std::move(agent)) {}
    std::vector<double> act(const Env&, const std::vector<double>& obs) override {
        return agent_.act(obs, true).action;
    }

private:
    PpoAgent agent_;
};

class HeuristicAdapter : public Policy {
public:
    explicit HeuristicAdapter(HeuristicPolicy p) : p_(std::move(p)) {}
    std::vector<double> act(const Env& env, const std::vector<double>&) override { return p_.act(env); }

private:
    HeuristicPolicy p_;
};

struct MetricsWriter {
    std::ostringstream out;
    std::string run_id;
    std::uint64_t seed;
    int every;
    int num_ues;

    MetricsWriter(std::string id, std::uint64_t s, int e, int k) : run_id(std::move(id)), seed(s), every(e), num_ues(k) {
        out << kMetricsSchema << "\n"
            << "run_id,seed,step,episode,episode_return,energy_j,per_ue_energy_j,violations,penalties\n";
    }

    void row(long step, long episode, double ret, double energy, int violations, double penalties) {
        if (episode % every != 0) return;
        out << run_id << ',' << seed << ',' << step << ',' << episode << ',' << num(ret) << ',' << num(energy) << ','
            << num(energy / num_ues) << ',' << violations << ',' << num(penalties) << "\n";
    }
};

// Running totals of the episode in progress.
struct EpisodeTally {
    double ret = 0.0;
    double energy = 0.0;
    double penalties = 0.0;
    int violations = 0;

    void add(const StepResult& r) {
        ret += r.reward.total;
        energy += step_energy(r);
        penalties += r.reward.penalties();
        violations += r.reward.violations();
    }
};

nlohmann::json make_checkpoint(const ExperimentConfig& cfg, AgentKind kind, std::uint64_t seed,
                               nlohmann::json model) {
    return {{"format", "rris-checkpoint"},
            {"version", 1},
            {"agent", to_string(kind)},
            {"config_hash", config_hash(cfg)},
            {"seed", seed},
            {"train_steps", cfg.train.steps},
            {"model", std::move(model)}};
}

void train_sac(const ExperimentConfig& cfg, AgentKind kind, std::uint64_t seed, MetricsWriter& metrics,
               nlohmann::json& model) {
    Env env(env_for_agent(cfg, kind));
    const int O = env.config().obs_dim();
    const int A = env.config().action_dim();
    SacAgent agent(O, A, cfg.sac, derive_seed(seed, kAgent, 0));
    ReplayBuffer buffer(static_cast<std::size_t>(cfg.sac.buffer_size), O, A);
    Rng explore(derive_seed(seed, kExplore, 0));
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    long episode = 0;
    env.reset(derive_seed(seed, kTrainEpisode, 0));
    std::vector<double> obs = env.observe();
    EpisodeTally tally;
    std::vector<double> raw(static_cast<std::size_t>(A));
    for (long step = 0; step < cfg.train.steps; ++step) {
        if (step < cfg.sac.warmup_steps) {
            for (double& r : raw) r = u(explore);
        } else {
            raw = agent.act(obs).action;
        }
        const StepResult r = env.step(env.decode_action(raw));
        std::vector<double> next = env.observe();
        buffer.add(obs, raw, r.reward.total, next, r.done);
        tally.add(r);
        if (r.done) {
            metrics.row(step + 1, episode, tally.ret, tally.energy, tally.violations, tally.penalties);
            ++episode;
            tally = EpisodeTally{};
            env.reset(derive_seed(seed, kTrainEpisode, static_cast<std::uint64_t>(episode)));
            next = env.observe();
        }
        obs = std::move(next);
        if (step + 1 >= cfg.sac.warmup_steps && (step + 1) % cfg.sac.update_every == 0) {
            for (int i = 0; i < cfg.sac.update_every; ++i) {
                agent.update(buffer.sample(static_cast<std::size_t>(cfg.sac.batch_size), agent.rng()));
            }
        }
    }
    model = agent.to_json();
}

void train_ppo(const ExperimentConfig& cfg, std::uint64_t seed, MetricsWriter& metrics, nlohmann::json& model) {
    Env env(env_for_agent(cfg, AgentKind::ppo));
    PpoAgent agent(env.config().obs_dim(), env.config().action_dim(), cfg.ppo, derive_seed(seed, kAgent, 0));
    Rollout rollout;
    long episode = 0;
    env.reset(derive_seed(seed, kTrainEpisode, 0));
    std::vector<double> obs = env.observe();
    EpisodeTally tally;
    for (long step = 0; step < cfg.train.steps; ++step) {
        const PpoSample s = agent.act(obs);
        const StepResult r = env.step(env.decode_action(s.action));
        rollout.add(obs, s, r.reward.total, r.done);
        tally.add(r);
        if (r.done) {
            metrics.row(step + 1, episode, tally.ret, tally.energy, tally.violations, tally.penalties);
            ++episode;
            tally = EpisodeTally{};
            env.reset(derive_seed(seed, kTrainEpisode, static_cast<std::uint64_t>(episode)));
        }
        obs = env.observe();
        const bool last = step + 1 == cfg.train.steps;
        if (static_cast<int>(rollout.size()) >= cfg.ppo.rollout_steps || last) {
            const double bootstrap = r.done ? 0.0 : agent.value(obs);
            compute_gae(rollout, cfg.ppo.gamma, cfg.ppo.gae_lambda, bootstrap);
            ppo_update(agent, rollout);
            rollout.clear();
        }
    }
    model = agent.to_json();
}

void run_heuristic(const ExperimentConfig& cfg, AgentKind kind, std::uint64_t seed, MetricsWriter& metrics) {
    Env env(env_for_agent(cfg, kind));
    HeuristicAdapter policy(HeuristicPolicy(HeuristicKind::local_only, env.config(), derive_seed(seed, kHeuristic, 0)));
    long step = 0;
    for (long episode = 0; step < cfg.train.steps; ++episode) {
        env.reset(derive_seed(seed, kTrainEpisode, static_cast<std::uint64_t>(episode)));
        EpisodeTally tally;
        while (!env.done() && step < cfg.train.steps) {
            const auto raw = policy.act(env, env.observe());
            tally.add(env.step(env.decode_action(raw)));
            ++step;
        }
        if (env.done()) metrics.row(step, episode, tally.ret, tally.energy, tally.violations, tally.penalties);
    }
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t purpose, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(base) ^ purpose) ^ index);
}

EnvConfig env_for_agent(const ExperimentConfig& cfg, AgentKind kind) {
    EnvConfig e = cfg.env;
    e.channel.num_ues = e.num_ues;
    switch (kind) {
        case AgentKind::fixed: e.rotation_mode = RotationMode::fixed; break;
        case AgentKind::random: e.rotation_mode = RotationMode::random; break;
        default: e.rotation_mode = RotationMode::learned; break;
    }
    return e;
}

std::unique_ptr<Policy> policy_from_checkpoint(const nlohmann::json& checkpoint, const ExperimentConfig& cfg,
                                               std::uint64_t seed) {
    if (checkpoint.value("format", "") != "rris-checkpoint") throw InvalidArgument("not a checkpoint document");
    if (checkpoint.value("version", 0) != 1) throw InvalidArgument("unsupported checkpoint version");
    const AgentKind kind = parse_agent(checkpoint.at("agent").get<std::string>());
    const EnvConfig e = env_for_agent(cfg, kind);
    switch (kind) {
        case AgentKind::local:
            return std::make_unique<HeuristicAdapter>(
                HeuristicPolicy(HeuristicKind::local_only, e, derive_seed(seed, kHeuristic, 0)));
        case AgentKind::ppo: {
            PpoAgent a = PpoAgent::from_json(checkpoint.at("model"));
            if (a.obs_dim() != e.obs_dim() || a.act_dim() != e.action_dim()) {
                throw InvalidArgument("checkpoint network does not fit this environment");
            }
            return std::make_unique<PpoPolicy>(std::move(a));
        }
        default: {
            SacAgent a = SacAgent::from_json(checkpoint.at("model"));
            if (a.obs_dim() != e.obs_dim() || a.act_dim() != e.action_dim()) {
                throw InvalidArgument("checkpoint network does not fit this environment");
            }
            return std::make_unique<SacPolicy>(std::move(a));
        }
    }
}

EpisodeOutcome play_episode(Env& env, Policy& policy, std::uint64_t episode_seed, bool keep_steps) {
    EpisodeOutcome out;
    env.reset(episode_seed);
    while (!env.done()) {
        const EnvState before = env.state();
        const auto raw = policy.act(env, env.observe());
        StepResult r = env.step(env.decode_action(raw));
        out.energy += step_energy(r);
        out.ret += r.reward.total;
        out.penalties += r.reward.penalties();
        out.violations += r.reward.violations();
        if (r.reward.p_theta > 0.0) ++out.p_theta_events;
        if (keep_steps) {
            out.before.push_back(before);
            out.steps.push_back(std::move(r));
        }
    }
    return out;
}

TrainOutput run_train(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const AgentKind kind = cfg.agent;
    MetricsWriter metrics(to_string(kind) + "-" + config_hash(cfg) + "-s" + std::to_string(seed), seed,
                          cfg.train.metrics_every, cfg.env.num_ues);
    nlohmann::json model = nullptr;
    switch (kind) {
        case AgentKind::sac:
        case AgentKind::fixed:
        case AgentKind::random: train_sac(cfg, kind, seed, metrics, model); break;
        case AgentKind::ppo: train_ppo(cfg, seed, metrics, model); break;
        case AgentKind::local: run_heuristic(cfg, kind, seed, metrics); break;
    }
    TrainOutput out;
    out.checkpoint = make_checkpoint(cfg, kind, seed, std::move(model));
    out.metrics_csv = metrics.out.str();
    out.wall_seconds = seconds_since(t0);
    return out;
}

nlohmann::json EvalSummary::to_json() const {
    return {{"schema", "rris-eval/1"},
            {"agent", agent},
            {"config_hash", config_hash},
            {"seed", seed},
            {"episodes", episodes},
            {"mean_energy_j", mean_energy},
            {"std_energy_j", std_energy},
            {"mean_return", mean_return},
            {"violation_rate", violation_rate},
            {"violations", violations},
            {"energies_j", energies},
            {"returns", returns}};
}

EvalSummary run_eval(const ExperimentConfig& cfg, const nlohmann::json& checkpoint, std::uint64_t seed,
                     int episodes) {
    cfg.validate();
    if (episodes < 1) throw InvalidArgument("episodes must be >= 1");
    const std::string hash = config_hash(cfg);
    const std::string stored = checkpoint.value("config_hash", "");
    if (stored != hash) {
        throw ConfigError("config_hash", "checkpoint was trained under configuration " + stored +
                                             " but this configuration is " + hash +
                                             "; evaluate with the training configuration");
    }
    const AgentKind kind = parse_agent(checkpoint.at("agent").get<std::string>());
    auto policy = policy_from_checkpoint(checkpoint, cfg, seed);
    Env env(env_for_agent(cfg, kind));
    EvalSummary s;
    s.agent = to_string(kind);
    s.config_hash = hash;
    s.seed = seed;
    s.episodes = episodes;
    int bad = 0;
    for (int e = 0; e < episodes; ++e) {
        const EpisodeOutcome o = play_episode(env, *policy, derive_seed(seed, kEvalEpisode, static_cast<std::uint64_t>(e)));
        s.energies.push_back(o.energy);
        s.returns.push_back(o.ret);
        s.violations += o.violations;
        if (o.violations > 0) ++bad;
    }
    // shifted by the first episode so identical episodes give an exact mean and zero spread
    const double e0 = s.energies.front();
    const double r0 = s.returns.front();
    double de = 0.0;
    double de2 = 0.0;
    double dr = 0.0;
    for (int e = 0; e < episodes; ++e) {
        const double d = s.energies[static_cast<std::size_t>(e)] - e0;
        de += d;
        de2 += d * d;
        dr += s.returns[static_cast<std::size_t>(e)] - r0;
    }
    s.mean_energy = e0 + de / episodes;
    s.mean_return = r0 + dr / episodes;
    s.std_energy = std::sqrt(std::max(0.0, (de2 - de * de / episodes) / episodes));
    s.violation_rate = static_cast<double>(bad) / episodes;
    return s;
}

std::vector<nlohmann::json> orientation_trace(const ExperimentConfig& cfg, const nlohmann::json& checkpoint,
                                              std::uint64_t seed, int episodes) {
    cfg.validate();
    if (episodes < 1) throw InvalidArgument("episodes must be >= 1");
    if (checkpoint.value("config_hash", "") != config_hash(cfg)) {
        throw ConfigError("config_hash", "checkpoint was trained under a different configuration");
    }
    const AgentKind kind = parse_agent(checkpoint.at("agent").get<std::string>());
    auto policy = policy_from_checkpoint(checkpoint, cfg, seed);
    Env env(env_for_agent(cfg, kind));
    std::vector<nlohmann::json> lines;
    for (int e = 0; e < episodes; ++e) {
        const EpisodeOutcome o =
            play_episode(env, *policy, derive_seed(seed, kEvalEpisode, static_cast<std::uint64_t>(e)), true);
        for (std::size_t i = 0; i < o.steps.size(); ++i) lines.push_back(step_record_json(o.steps[i], e, o.before[i]));
    }
    return lines;
}

std::vector<SweepCell> run_sweep_cells(const ExperimentConfig& cfg, SweepAxis axis) {
    cfg.validate();
    const auto& values = axis == SweepAxis::elements ? cfg.sweep.elements : cfg.sweep.ues;
    std::vector<SweepCell> cells;
    for (int v : values) {
        for (AgentKind scheme : cfg.sweep.schemes) {
            for (std::uint64_t seed : cfg.train.seeds) cells.push_back(SweepCell{axis, v, scheme, seed, {}, 0.0});
        }
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                SweepCell& c = cells[i];
                ExperimentConfig local = cfg;
                if (axis == SweepAxis::elements) {
                    local.env.num_elements = c.value;
                } else {
                    local.env.num_ues = c.value;
                    local.env.channel.num_ues = c.value;
                }
                local.agent = c.scheme;
                const TrainOutput t = run_train(local, c.seed);
                c.train_seconds = t.wall_seconds;
                c.summary = run_eval(local, t.checkpoint, c.seed, cfg.train.eval_episodes);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    const int n = std::min<int>(cfg.train.workers, static_cast<int>(cells.size()));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
    std::ostringstream out;
    out << kSweepSchema << "\n"
        << "axis,value,scheme,seed,mean_energy_j,std_energy_j,mean_return,violation_rate,episodes\n";
    for (const auto& c : cells) {
        out << to_string(c.axis) << ',' << c.value << ',' << to_string(c.scheme) << ',' << c.seed << ','
            << num(c.summary.mean_energy) << ',' << num(c.summary.std_energy) << ',' << num(c.summary.mean_return)
            << ',' << num(c.summary.violation_rate) << ',' << c.summary.episodes << "\n";
    }
    return out.str();
}

namespace {

const char* kPowerHeader =
    "index,alpha_d_bits,bandwidth_hz,channel_gain,noise_w,p_max_w,slot_tau_s,p_hat_w,p_star_w,y_star,energy_j,"
    "iterations,converged\n";

void power_row(std::ostringstream& out, std::size_t i, const PowerInstance& inst) {
    const PowerBound pb = min_feasible_power(inst);
    const DinkelbachResult r = dinkelbach_solve(inst, DinkelbachSettings{});
    out << i << ',' << num(inst.alpha_d) << ',' << num(inst.bandwidth) << ',' << num(inst.channel_gain) << ','
        << num(inst.noise) << ',' << num(inst.p_max) << ',' << num(inst.slot_tau) << ',' << num(pb.watts) << ','
        << num(r.p_star) << ',' << num(r.y_star) << ',' << num(offload_energy_at(inst, r.p_star)) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << "\n";
}

} // namespace

std::string power_batch_csv(std::uint64_t seed, int count) {
    if (count < 1) throw InvalidArgument("count must be >= 1");
    Rng rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::ostringstream out;
    out << kPowerSchema << "\n" << kPowerHeader;
    for (int i = 0; i < count; ++i) {
        PowerInstance inst;
        inst.alpha_d = 1e5 + u01(rng) * 4.9e6;
        inst.bandwidth = 5e5 + u01(rng) * 3.5e6;
        inst.noise = 1e-14;
        inst.slot_tau = 0.5 + u01(rng) * 2.5;
        inst.channel_gain = std::pow(10.0, -12.0 + 4.0 * u01(rng));
        // keep the instance feasible: p_max between 1.5x and 50x the minimum power
        inst.p_max = min_feasible_power(inst).watts * (1.5 + 48.5 * u01(rng));
        power_row(out, static_cast<std::size_t>(i), inst);
    }
    return out.str();
}

std::string power_batch_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::ostringstream out;
    out << kPowerSchema << "\n" << kPowerHeader;
    std::size_t index = 0;
    bool header = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (header) {
            header = false;
            if (line.find_first_of("abcdefghijklmnopqrstuvwxyz") != std::string::npos) continue;
        }
        std::vector<double> v;
        std::istringstream fields(line);
        std::string f;
        while (std::getline(fields, f, ',')) {
            double x = 0.0;
            const auto b = f.find_first_not_of(' ');
            const char* first = f.data() + (b == std::string::npos ? f.size() : b);
            const auto res = std::from_chars(first, f.data() + f.size(), x);
            if (res.ec != std::errc{}) {
                throw InvalidArgument("line " + std::to_string(lineno) + ": '" + f + "' is not a number");
            }
            v.push_back(x);
        }
        if (v.size() != 6) {
            throw InvalidArgument("line " + std::to_string(lineno) +
                                  ": expected alpha_D, B_k, gain, noise, p_max, tau");
        }
        const PowerInstance inst{v[0], v[1], v[2], v[3], v[4], v[5]};
        power_row(out, index++, inst);
    }
    return out.str();
}

} // namespace rris
