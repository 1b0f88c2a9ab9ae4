#include "rris/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "rris/error.hpp"
#include "rris/policy.hpp"
#include "rris/sac.hpp"

namespace rris {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

Matrix columns(const std::vector<std::vector<double>>& v, std::span<const std::size_t> idx) {
    Matrix m(static_cast<Eigen::Index>(v.front().size()), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
        const auto& col = v[idx[c]];
        for (std::size_t r = 0; r < col.size(); ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
    }
    return m;
}

} // namespace

void Rollout::add(std::span<const double> o, const PpoSample& s, double r, bool d) {
    obs.emplace_back(o.begin(), o.end());
    pre_tanh.push_back(s.pre_tanh);
    log_prob.push_back(s.log_prob);
    value.push_back(s.value);
    reward.push_back(r);
    done.push_back(d ? 1.0 : 0.0);
}

void Rollout::clear() { *this = Rollout{}; }

void compute_gae(Rollout& r, double gamma, double lambda, double last_value) {
    const std::size_t n = r.size();
    r.advantage.assign(n, 0.0);
    r.ret.assign(n, 0.0);
    double gae = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        const double next_v = (t + 1 < n) ? r.value[t + 1] : last_value;
        const double live = 1.0 - r.done[t];
        const double delta = r.reward[t] + gamma * next_v * live - r.value[t];
        gae = delta + gamma * lambda * live * gae;
        r.advantage[t] = gae;
        r.ret[t] = gae + r.value[t];
    }
}

PpoAgent::PpoAgent(int obs_dim, int act_dim, PpoConfig config, std::uint64_t seed)
    : obs_dim_(obs_dim), act_dim_(act_dim), config_(config), rng_(seed) {
    if (!(config_.clip > 0.0)) throw InvalidArgument("clip must be > 0");
    if (config_.epochs < 1 || config_.minibatch < 1) throw InvalidArgument("epochs and minibatch must be >= 1");
    actor = make_mlp(obs_dim, config_.hidden, config_.layers, act_dim, config_.activation);
    critic = make_mlp(obs_dim, config_.hidden, config_.layers, 1, config_.activation);
    actor.init(rng_, 0.1);
    critic.init(rng_);
    log_std.assign(static_cast<std::size_t>(act_dim), config_.init_log_std);
    actor_opt_ = Adam(actor.num_params());
    log_std_opt_ = Adam(log_std.size());
    critic_opt_ = Adam(critic.num_params());
}

PpoSample PpoAgent::act(std::span<const double> obs, bool deterministic) {
    const Vector mean = actor.forward(obs);
    PpoSample s;
    s.action.resize(static_cast<std::size_t>(act_dim_));
    s.pre_tanh.resize(static_cast<std::size_t>(act_dim_));
    std::normal_distribution<double> g(0.0, 1.0);
    double lp = 0.0;
    for (int i = 0; i < act_dim_; ++i) {
        const double ls = log_std[static_cast<std::size_t>(i)];
        const double eps = deterministic ? 0.0 : g(rng_);
        const double u = mean(i) + std::exp(ls) * eps;
        s.pre_tanh[static_cast<std::size_t>(i)] = u;
        s.action[static_cast<std::size_t>(i)] = squash(u);
        lp += -0.5 * eps * eps - ls - kHalfLog2Pi;
    }
    s.log_prob = lp;
    s.value = value(obs);
    return s;
}

double PpoAgent::value(std::span<const double> obs) const { return critic.forward(obs)(0); }

Eigen::RowVectorXd PpoAgent::log_prob(const Matrix& obs, const Matrix& pre_tanh) const {
    const Matrix mean = actor.forward(obs);
    Eigen::RowVectorXd lp = Eigen::RowVectorXd::Zero(obs.cols());
    for (Eigen::Index b = 0; b < obs.cols(); ++b) {
        for (Eigen::Index i = 0; i < mean.rows(); ++i) {
            const double ls = log_std[static_cast<std::size_t>(i)];
            const double z = (pre_tanh(i, b) - mean(i, b)) * std::exp(-ls);
            lp(b) += -0.5 * z * z - ls - kHalfLog2Pi;
        }
    }
    return lp;
}

PpoLosses ppo_update(PpoAgent& agent, const Rollout& rollout) {
    const PpoConfig& cfg = agent.config_;
    const std::size_t n = rollout.size();
    if (n == 0) throw InvalidState("empty rollout");
    if (rollout.advantage.size() != n) throw InvalidState("advantages have not been computed");

    std::vector<double> adv = rollout.advantage;
    if (cfg.normalize_advantages && n > 1) {
        const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(n);
        double var = 0.0;
        for (double a : adv) var += (a - mean) * (a - mean);
        const double sd = std::sqrt(var / static_cast<double>(n));
        for (double& a : adv) a = (a - mean) / (sd + 1e-8);
    }

    const auto A = static_cast<Eigen::Index>(agent.act_dim_);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    PpoLosses out;
    long batches = 0;
    long clipped = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), agent.rng_);
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.minibatch)) {
            const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.minibatch));
            const std::span<const std::size_t> idx(order.data() + start, stop - start);
            const auto B = static_cast<Eigen::Index>(idx.size());
            const double inv_b = 1.0 / static_cast<double>(B);
            const Matrix obs = columns(rollout.obs, idx);
            const Matrix u = columns(rollout.pre_tanh, idx);

            // policy
            Tape tape;
            const Matrix mean = agent.actor.forward(obs, tape);
            Matrix g_mean = Matrix::Zero(A, B);
            std::vector<double> g_ls(static_cast<std::size_t>(A), 0.0);
            double policy_loss = 0.0;
            for (Eigen::Index b = 0; b < B; ++b) {
                double lp = 0.0;
                for (Eigen::Index i = 0; i < A; ++i) {
                    const double ls = agent.log_std[static_cast<std::size_t>(i)];
                    const double z = (u(i, b) - mean(i, b)) * std::exp(-ls);
                    lp += -0.5 * z * z - ls - kHalfLog2Pi;
                }
                const std::size_t t = idx[static_cast<std::size_t>(b)];
                const double ratio = std::exp(lp - rollout.log_prob[t]);
                const double a = adv[t];
                const double unclipped = ratio * a;
                const double bounded = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * a;
                policy_loss -= std::min(unclipped, bounded);
                // the clipped branch is active (and flat) when it is the strict minimum
                const bool flat = bounded < unclipped;
                if (flat) {
                    ++clipped;
                    continue;
                }
                // d(-ratio*a)/d(lp) = -ratio*a
                const double g_lp = -unclipped * inv_b;
                if (g_lp == 0.0) continue;
                for (Eigen::Index i = 0; i < A; ++i) {
                    const double ls = agent.log_std[static_cast<std::size_t>(i)];
                    const double inv_var = std::exp(-2.0 * ls);
                    const double diff = u(i, b) - mean(i, b);
                    g_mean(i, b) += g_lp * diff * inv_var;
                    g_ls[static_cast<std::size_t>(i)] += g_lp * (diff * diff * inv_var - 1.0);
                }
            }
            // Gaussian entropy is sum(log_std) + const
            for (Eigen::Index i = 0; i < A; ++i) g_ls[static_cast<std::size_t>(i)] -= cfg.entropy_coef;
            ParamVector ga(agent.actor.num_params(), 0.0);
            agent.actor.backward(tape, g_mean, ga);
            const bool moved = std::any_of(ga.begin(), ga.end(), [](double v) { return v != 0.0; }) ||
                               std::any_of(g_ls.begin(), g_ls.end(), [](double v) { return v != 0.0; });
            if (moved) {
                agent.actor_opt_.step(agent.actor.params(), ga, cfg.lr_actor);
                agent.log_std_opt_.step(agent.log_std, g_ls, cfg.lr_actor);
            }

            // value
            Tape vt;
            const Eigen::RowVectorXd v = agent.critic.forward(obs, vt).row(0);
            Matrix gv(1, B);
            double value_loss = 0.0;
            for (Eigen::Index b = 0; b < B; ++b) {
                const double e = v(b) - rollout.ret[idx[static_cast<std::size_t>(b)]];
                value_loss += e * e * inv_b;
                gv(0, b) = 2.0 * e * inv_b;
            }
            ParamVector gc(agent.critic.num_params(), 0.0);
            agent.critic.backward(vt, gv, gc);
            agent.critic_opt_.step(agent.critic.params(), gc, cfg.lr_critic);

            out.policy += policy_loss * inv_b;
            out.value += value_loss;
            ++batches;
        }
    }
    out.policy /= static_cast<double>(batches);
    out.value /= static_cast<double>(batches);
    out.entropy = 0.0;
    for (double ls : agent.log_std) out.entropy += ls + 0.5 + kHalfLog2Pi;
    out.clipped_fraction = static_cast<double>(clipped) / static_cast<double>(n * static_cast<std::size_t>(cfg.epochs));
    return out;
}

namespace {

nlohmann::json ppo_config_json(const PpoConfig& c) {
    return {{"gamma", c.gamma},       {"gae_lambda", c.gae_lambda},
            {"clip", c.clip},         {"lr_actor", c.lr_actor},
            {"lr_critic", c.lr_critic}, {"entropy_coef", c.entropy_coef},
            {"epochs", c.epochs},     {"minibatch", c.minibatch},
            {"rollout_steps", c.rollout_steps}, {"hidden", c.hidden},
            {"layers", c.layers},     {"init_log_std", c.init_log_std},
            {"normalize_advantages", c.normalize_advantages}, {"activation", to_string(c.activation)}};
}

PpoConfig ppo_config_from_json(const nlohmann::json& j) {
    PpoConfig c;
    c.gamma = j.at("gamma").get<double>();
    c.gae_lambda = j.at("gae_lambda").get<double>();
    c.clip = j.at("clip").get<double>();
    c.lr_actor = j.at("lr_actor").get<double>();
    c.lr_critic = j.at("lr_critic").get<double>();
    c.entropy_coef = j.at("entropy_coef").get<double>();
    c.epochs = j.at("epochs").get<int>();
    c.minibatch = j.at("minibatch").get<int>();
    c.rollout_steps = j.at("rollout_steps").get<int>();
    c.hidden = j.at("hidden").get<int>();
    c.layers = j.at("layers").get<int>();
    c.init_log_std = j.at("init_log_std").get<double>();
    c.normalize_advantages = j.at("normalize_advantages").get<bool>();
    c.activation = parse_activation(j.at("activation").get<std::string>());
    return c;
}

} // namespace

nlohmann::json PpoAgent::to_json() const {
    return {{"obs_dim", obs_dim_},
            {"act_dim", act_dim_},
            {"config", ppo_config_json(config_)},
            {"actor", mlp_to_json(actor)},
            {"critic", mlp_to_json(critic)},
            {"log_std", log_std},
            {"actor_opt", adam_to_json(actor_opt_)},
            {"log_std_opt", adam_to_json(log_std_opt_)},
            {"critic_opt", adam_to_json(critic_opt_)},
            {"rng", rng_to_json(rng_)}};
}

PpoAgent PpoAgent::from_json(const nlohmann::json& j) {
    PpoAgent a(j.at("obs_dim").get<int>(), j.at("act_dim").get<int>(), ppo_config_from_json(j.at("config")), 0);
    a.actor = mlp_from_json(j.at("actor"));
    a.critic = mlp_from_json(j.at("critic"));
    a.log_std = j.at("log_std").get<std::vector<double>>();
    if (a.log_std.size() != static_cast<std::size_t>(a.act_dim_)) throw InvalidArgument("checkpoint log_std size mismatch");
    a.actor_opt_ = adam_from_json(j.at("actor_opt"));
    a.log_std_opt_ = adam_from_json(j.at("log_std_opt"));
    a.critic_opt_ = adam_from_json(j.at("critic_opt"));
    a.rng_ = rng_from_json(j.at("rng"));
    return a;
}

} // namespace rris
