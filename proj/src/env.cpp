#include "rris/env.hpp"

#include <algorithm>
#include <cmath>

#include "rris/error.hpp"

namespace rris {

std::string to_string(RotationMode m) {
    switch (m) {
        case RotationMode::learned: return "learned";
        case RotationMode::fixed: return "fixed";
        case RotationMode::random: return "random";
    }
    return "learned";
}

std::string to_string(PowerSolver s) {
    return s == PowerSolver::dinkelbach ? "dinkelbach" : "closed_form";
}

RotationMode parse_rotation_mode(const std::string& s) {
    if (s == "learned") return RotationMode::learned;
    if (s == "fixed") return RotationMode::fixed;
    if (s == "random") return RotationMode::random;
    throw InvalidArgument("unknown rotation mode '" + s + "'");
}

PowerSolver parse_power_solver(const std::string& s) {
    if (s == "closed_form") return PowerSolver::closed_form;
    if (s == "dinkelbach") return PowerSolver::dinkelbach;
    throw InvalidArgument("unknown power solver '" + s + "'");
}

ChannelParams EnvConfig::channel_params() const {
    ChannelParams c = channel;
    c.num_ues = num_ues;
    return c;
}

void EnvConfig::validate() const {
    if (num_ues < 1) throw InvalidArgument("num_ues must be >= 1");
    if (num_elements < 1) throw InvalidArgument("num_elements must be >= 1");
    if (phase_bits < 1 || phase_bits > 16) throw InvalidArgument("phase_bits must lie in [1,16]");
    if (!(p_max > 0) || !(f_edge_total > 0) || !(penalty_w > 0)) {
        throw InvalidArgument("p_max, f_edge_total and the penalty weight must be > 0");
    }
    mobility.validate();
    channel_params().validate();
    radiation.validate();
    task.validate();
    if (distance(mobility.region_center, ris.position) <= mobility.region_radius) {
        throw DegenerateGeometry("the mobility region must not contain the RIS");
    }
}

double pattern_at(const EnvConfig& config, const Position& ue, double rotation) {
    RisPose pose = config.ris;
    pose.rotation = rotation;
    const Position ues[] = {ue};
    const AngleSet a = angles_from_geometry(pose, config.bs, ues);
    return pattern_factor(config.radiation, a.theta_k[0], a.theta_B, a.indicator_k[0]);
}

double centroid_rotation(const EnvConfig& config) {
    RisPose pose = config.ris;
    pose.rotation = 0.0;
    const Interval b = rotation_bounds(planar_angle(pose.initial_plane_direction, pose.position, config.bs));
    const Position& c = config.mobility.region_center;
    auto f = [&](double d) { return pattern_at(config, c, d); };

    constexpr int kGrid = 4096;
    const double h = b.width() / kGrid;
    int best = 0;
    double best_v = -1.0;
    for (int i = 0; i <= kGrid; ++i) {
        const double v = f(b.lo + i * h);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    // Golden-section refinement inside the winning grid bracket.
    double lo = std::max(b.lo, b.lo + (best - 1) * h);
    double hi = std::min(b.hi, b.lo + (best + 1) * h);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    const double refined = 0.5 * (lo + hi);
    return f(refined) >= best_v ? refined : b.lo + best * h;
}

Env::Env(EnvConfig config) : config_(std::move(config)) {
    config_.channel.num_ues = config_.num_ues;
    config_.validate();
    theta0_B_ = planar_angle(config_.ris.initial_plane_direction, config_.ris.position, config_.bs);
    fixed_rotation_ = centroid_rotation(config_);
    const double dc = distance(config_.mobility.region_center, config_.ris.position);
    dist_lo_ = std::max(0.0, dc - config_.mobility.region_radius);
    dist_hi_ = dc + config_.mobility.region_radius;
    codebook_ = phase_codebook(config_.phase_bits);
}

EnvState Env::reset(std::uint64_t seed) {
    auto derive = [seed](std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream)};
        return Rng(seq);
    };
    mobility_rng_ = derive(1);
    fading_rng_ = derive(2);
    compare_rng_ = derive(3);
    rotation_rng_ = derive(4);
    mobility_ = initial_mobility(config_.num_ues, config_.mobility, mobility_rng_);
    state_ = EnvState{};
    state_.cum_alpha.assign(static_cast<std::size_t>(config_.num_ues), 0.0);
    state_.slot_index = 1;
    done_ = false;
    state_ = make_state();
    return state_;
}

EnvState Env::make_state() const {
    EnvState s;
    s.cum_alpha = state_.cum_alpha;
    s.slot_index = state_.slot_index;
    RisPose pose = config_.ris;
    pose.rotation = 0.0;
    const Distances d = distances(pose, config_.bs, mobility_.positions);
    const AngleSet a = angles_from_geometry(pose, config_.bs, mobility_.positions);
    s.distances = d.d_kR;
    s.angles = a.theta0_k;
    return s;
}

std::vector<double> Env::observe() const { return observe(state_); }

std::vector<double> Env::observe(const EnvState& s) const {
    std::vector<double> obs;
    obs.reserve(static_cast<std::size_t>(config_.obs_dim()));
    const double span = dist_hi_ - dist_lo_;
    for (double d : s.distances) obs.push_back(std::clamp((d - dist_lo_) / span, 0.0, 1.0));
    for (double a : s.angles) obs.push_back(a / kTwoPi);
    for (double c : s.cum_alpha) obs.push_back(c);
    const int steps = config_.decision_steps();
    obs.push_back(steps > 1 ? static_cast<double>(s.slot_index - 1) / (steps - 1) : 0.0);
    return obs;
}

EnvAction Env::decode_action(std::span<const double> raw) {
    const auto expected = static_cast<std::size_t>(config_.action_dim());
    if (raw.size() != expected) {
        throw InvalidArgument("raw action has length " + std::to_string(raw.size()) + ", expected " +
                              std::to_string(expected));
    }
    auto unit = [](double r) { return 0.5 * (std::clamp(r, -1.0, 1.0) + 1.0); };

    EnvAction a;
    const Interval b = rotation_interval();
    switch (config_.rotation_mode) {
        case RotationMode::learned: a.rotation = b.lo + unit(raw[0]) * b.width(); break;
        case RotationMode::fixed: a.rotation = fixed_rotation_; break;
        case RotationMode::random: {
            std::uniform_real_distribution<double> u(b.lo, b.hi);
            a.rotation = u(rotation_rng_);
            break;
        }
    }
    a.rotation = std::clamp(a.rotation, b.lo, b.hi);

    const int levels = 1 << config_.phase_bits;
    const double step = kTwoPi / levels;
    const double top = codebook_.back();
    a.phases.bits = config_.phase_bits;
    a.phases.phases.reserve(static_cast<std::size_t>(config_.num_elements));
    for (int n = 0; n < config_.num_elements; ++n) {
        const double cont = unit(raw[1 + static_cast<std::size_t>(n)]) * top;
        const long idx = std::clamp(std::lround(cont / step), 0L, static_cast<long>(levels - 1));
        a.phases.phases.push_back(codebook_[static_cast<std::size_t>(idx)]);
    }
    a.alphas.reserve(static_cast<std::size_t>(config_.num_ues));
    for (int k = 0; k < config_.num_ues; ++k) {
        a.alphas.push_back(unit(raw[1 + static_cast<std::size_t>(config_.num_elements + k)]));
    }
    return a;
}

double Env::channel_metric(const FadingSample& fading, double rotation, const PhaseConfig& phases,
                           std::span<const double> alphas) const {
    LinkGeometry geo{config_.ris, config_.bs, mobility_.positions};
    geo.ris.rotation = rotation;
    const ChannelDraw draw = compose_channels(config_.channel_params(), geo, config_.num_elements, fading);
    const AngleSet angles = angles_from_geometry(geo.ris, config_.bs, mobility_.positions);
    double sum = 0.0;
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        if (alphas[k] <= 0.0) continue;
        const auto g = ris_gain(config_.radiation, angles, phases, k);
        sum += std::norm(effective_channel(draw, g, k));
    }
    return sum;
}

StepResult Env::step(const EnvAction& action) {
    if (done_) throw InvalidState("step() called on a finished episode; call reset()");
    const auto K = static_cast<std::size_t>(config_.num_ues);
    const auto N = static_cast<std::size_t>(config_.num_elements);
    if (action.alphas.size() != K || action.phases.phases.size() != N) {
        throw InvalidArgument("action dimensions do not match the environment");
    }
    if (action.phases.bits != config_.phase_bits) throw InvalidArgument("action uses a different phase resolution");
    action.phases.validate();
    const Interval bounds = rotation_interval();
    if (!bounds.contains(action.rotation)) throw InvalidArgument("rotation outside the admissible interval");

    const ChannelParams cp = config_.channel_params();
    const TaskSpec& task = config_.task;
    const double tau = task.slot_tau();
    const double W = config_.penalty_w;

    StepResult out;
    out.slot = state_.slot_index;
    out.action = action;
    out.positions = mobility_.positions;

    // (1) geometry, fading and effective channels under the chosen orientation
    LinkGeometry geo{config_.ris, config_.bs, mobility_.positions};
    geo.ris.rotation = action.rotation;
    out.angles = angles_from_geometry(geo.ris, config_.bs, mobility_.positions);
    const FadingSample fading = sample_fading(config_.num_ues, config_.num_elements, fading_rng_);
    const ChannelDraw draw = compose_channels(cp, geo, config_.num_elements, fading);

    // (2) power control and offloading energy per UE
    out.ues.resize(K);
    RewardBreakdown& rb = out.reward;
    for (std::size_t k = 0; k < K; ++k) {
        UeSlotInfo& u = out.ues[k];
        u.alpha = action.alphas[k];
        const auto g = ris_gain(config_.radiation, out.angles, action.phases, k);
        const Complex h = effective_channel(draw, g, k);
        u.channel_gain = std::norm(h);
        bool violated = state_.cum_alpha[k] + u.alpha > 1.0;
        if (u.alpha > 0.0) {
            const PowerInstance inst{u.alpha * task.size_bits, cp.bandwidth_per_ue(), u.channel_gain, cp.noise_power,
                                     config_.p_max, tau};
            const PowerBound pb = min_feasible_power(inst);
            u.p_hat = pb.watts;
            if (pb.no_channel) {
                violated = true;
                u.power = config_.p_max;
                u.t_off = tau;
                u.e_off = offload_energy(tau, u.power);
            } else {
                if (pb.exceeds_pmax) {
                    violated = true;
                    u.power = config_.p_max;
                } else if (config_.power_solver == PowerSolver::dinkelbach) {
                    u.power = dinkelbach_solve(inst, config_.dinkelbach).p_star;
                } else {
                    u.power = pb.watts;
                }
                const double rate = achievable_rate(h, u.power, cp);
                u.t_off = offload_time(u.alpha, task, rate);
                // p_hat makes t_off == tau up to round-off
                if (u.t_off > tau * (1.0 + 1e-9)) violated = true;
                u.e_off = offload_energy(u.t_off, u.power);
            }
        }
        u.violated = violated;
        rb.offload_energy += u.e_off;
        if (violated) ++rb.k_un;
    }

    // (4) compare against a random orientation and phase draw on the same fading
    out.policy_metric = channel_metric(fading, action.rotation, action.phases, action.alphas);
    {
        std::uniform_real_distribution<double> ur(bounds.lo, bounds.hi);
        std::uniform_int_distribution<std::size_t> ui(0, codebook_.size() - 1);
        const double rot = ur(compare_rng_);
        PhaseConfig ph{config_.phase_bits, {}};
        ph.phases.reserve(N);
        for (std::size_t n = 0; n < N; ++n) ph.phases.push_back(codebook_[ui(compare_rng_)]);
        out.random_metric = channel_metric(fading, rot, ph, action.alphas);
    }
    rb.p_theta = out.random_metric > out.policy_metric ? W : 0.0;
    rb.p1 = rb.k_un * W + rb.p_theta;

    for (std::size_t k = 0; k < K; ++k) state_.cum_alpha[k] += action.alphas[k];

    // (5) reward; the last decision slot also settles local computing and the edge budget
    const bool final_step = state_.slot_index >= config_.decision_steps();
    if (final_step) {
        std::vector<double> f_edge(K);
        for (std::size_t k = 0; k < K; ++k) {
            const double eta = std::clamp(state_.cum_alpha[k], 0.0, 1.0);
            const FrequencyChoice fl = optimal_local_freq(task, eta);
            if (fl.exceeds_cap) ++rb.local_cap_violations;
            const TimeEnergy le = local_time_energy(task, eta, fl.hz);
            out.ues[k].f_loc = fl.hz;
            out.ues[k].e_loc = le.joules;
            out.ues[k].f_edge = f_edge[k] = optimal_edge_alloc(task, eta);
            rb.local_energy += le.joules;
        }
        rb.resource_penalty = edge_oversubscription(f_edge, config_.f_edge_total) / config_.f_edge_total * W;
        rb.p2 = rb.resource_penalty + rb.local_cap_violations * W + rb.p1;
        rb.total = -(rb.offload_energy + rb.local_energy) - rb.p2;
    } else {
        rb.total = -rb.offload_energy - rb.p1;
    }

    // (6) move the UEs and advance the slot
    mobility_ = step_mobility(mobility_, config_.mobility, tau, mobility_rng_);
    if (final_step) {
        done_ = true;
    } else {
        ++state_.slot_index;
    }
    state_ = make_state();
    out.state = state_;
    out.done = done_;
    return out;
}

double step_energy(const StepResult& r) {
    return r.reward.offload_energy + r.reward.local_energy;
}

nlohmann::json step_record_json(const StepResult& r, int episode, const EnvState& before) {
    using nlohmann::json;
    json ue_energy = json::array();
    json ue_info = json::array();
    for (const auto& u : r.ues) {
        ue_energy.push_back(u.e_off + u.e_loc);
        ue_info.push_back({{"alpha", u.alpha},
                           {"channel_gain", u.channel_gain},
                           {"p_hat", u.p_hat},
                           {"power", u.power},
                           {"t_off", u.t_off},
                           {"e_off", u.e_off},
                           {"e_loc", u.e_loc},
                           {"f_loc", u.f_loc},
                           {"f_edge", u.f_edge},
                           {"violated", u.violated}});
    }
    json pos = json::array();
    for (const auto& p : r.positions) pos.push_back({p.x, p.y});
    return json{
        {"episode", episode},
        {"slot", r.slot},
        {"state", {{"distances", before.distances}, {"angles", before.angles}, {"cum_alpha", before.cum_alpha}}},
        {"action", {{"rotation", r.action.rotation}, {"phases", r.action.phases.phases}, {"alphas", r.action.alphas}}},
        {"reward",
         {{"offload_energy", r.reward.offload_energy},
          {"local_energy", r.reward.local_energy},
          {"p1", r.reward.p1},
          {"p2", r.reward.p2},
          {"k_un", r.reward.k_un},
          {"p_theta", r.reward.p_theta},
          {"resource_penalty", r.reward.resource_penalty},
          {"total", r.reward.total}}},
        {"ue_energy", ue_energy},
        {"ue", ue_info},
        {"positions", pos},
        {"theta_k", r.angles.theta_k},
        {"theta_B", r.angles.theta_B},
        {"indicator", r.angles.indicator_k},
        {"done", r.done},
    };
}

} // namespace rris
