#include "rris/sac.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "rris/error.hpp"

namespace rris {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int obs_dim, int act_dim)
    : capacity_(capacity), obs_dim_(obs_dim), act_dim_(act_dim) {
    if (capacity == 0 || obs_dim < 1 || act_dim < 1) throw InvalidArgument("invalid replay buffer shape");
    obs_.resize(capacity * static_cast<std::size_t>(obs_dim));
    next_obs_.resize(capacity * static_cast<std::size_t>(obs_dim));
    act_.resize(capacity * static_cast<std::size_t>(act_dim));
    rew_.resize(capacity);
    done_.resize(capacity);
}

void ReplayBuffer::add(std::span<const double> obs, std::span<const double> action, double reward,
                       std::span<const double> next_obs, bool done) {
    if (obs.size() != static_cast<std::size_t>(obs_dim_) || next_obs.size() != static_cast<std::size_t>(obs_dim_) ||
        action.size() != static_cast<std::size_t>(act_dim_)) {
        throw InvalidArgument("transition does not match the replay buffer shape");
    }
    const std::size_t o = head_ * static_cast<std::size_t>(obs_dim_);
    std::copy(obs.begin(), obs.end(), obs_.begin() + static_cast<std::ptrdiff_t>(o));
    std::copy(next_obs.begin(), next_obs.end(), next_obs_.begin() + static_cast<std::ptrdiff_t>(o));
    std::copy(action.begin(), action.end(),
              act_.begin() + static_cast<std::ptrdiff_t>(head_ * static_cast<std::size_t>(act_dim_)));
    rew_[head_] = reward;
    done_[head_] = done ? 1.0 : 0.0;
    head_ = (head_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

void ReplayBuffer::copy_into(Batch& b, std::size_t col, std::size_t slot) const {
    const auto c = static_cast<Eigen::Index>(col);
    for (int i = 0; i < obs_dim_; ++i) {
        b.obs(i, c) = obs_[slot * static_cast<std::size_t>(obs_dim_) + static_cast<std::size_t>(i)];
        b.next_obs(i, c) = next_obs_[slot * static_cast<std::size_t>(obs_dim_) + static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < act_dim_; ++i) {
        b.action(i, c) = act_[slot * static_cast<std::size_t>(act_dim_) + static_cast<std::size_t>(i)];
    }
    b.reward(c) = rew_[slot];
    b.done(c) = done_[slot];
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
    if (size_ == 0) throw InvalidState("cannot sample from an empty replay buffer");
    const std::size_t n = std::min(batch_size, size_);
    // Floyd's algorithm: n distinct indices in [0, size_)
    std::vector<std::size_t> picks;
    picks.reserve(n);
    std::unordered_set<std::size_t> seen;
    for (std::size_t j = size_ - n; j < size_; ++j) {
        std::uniform_int_distribution<std::size_t> u(0, j);
        const std::size_t t = u(rng);
        if (seen.insert(t).second) {
            picks.push_back(t);
        } else {
            seen.insert(j);
            picks.push_back(j);
        }
    }
    Batch b;
    const auto B = static_cast<Eigen::Index>(n);
    b.obs.resize(obs_dim_, B);
    b.next_obs.resize(obs_dim_, B);
    b.action.resize(act_dim_, B);
    b.reward.resize(B);
    b.done.resize(B);
    const std::size_t oldest = size_ < capacity_ ? 0 : head_;
    for (std::size_t c = 0; c < n; ++c) copy_into(b, c, (oldest + picks[c]) % capacity_);
    return b;
}

Batch ReplayBuffer::at(std::size_t i) const {
    if (i >= size_) throw InvalidArgument("replay index out of range");
    Batch b;
    b.obs.resize(obs_dim_, 1);
    b.next_obs.resize(obs_dim_, 1);
    b.action.resize(act_dim_, 1);
    b.reward.resize(1);
    b.done.resize(1);
    const std::size_t oldest = size_ < capacity_ ? 0 : head_;
    copy_into(b, 0, (oldest + i) % capacity_);
    return b;
}

SacAgent::SacAgent(int obs_dim, int act_dim, SacConfig config, std::uint64_t seed)
    : obs_dim_(obs_dim), act_dim_(act_dim), config_(config), rng_(seed) {
    // gamma = 0 and temperature = 0 are accepted as limits; experiment configs stay stricter
    if (!(config_.gamma >= 0.0 && config_.gamma <= 1.0)) throw InvalidArgument("gamma must lie in [0,1]");
    if (!(config_.polyak > 0.0 && config_.polyak < 1.0)) throw InvalidArgument("polyak must lie in (0,1)");
    if (!(config_.temperature >= 0.0)) throw InvalidArgument("temperature must be >= 0");
    if (config_.auto_temperature && !(config_.temperature > 0.0)) {
        throw InvalidArgument("automatic temperature needs a positive start value");
    }
    if (config_.batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
    actor = make_mlp(obs_dim, config_.hidden, config_.layers, 2 * act_dim, config_.activation);
    q1 = make_mlp(obs_dim + act_dim, config_.hidden, config_.layers, 1, config_.activation);
    q2 = q1;
    actor.init(rng_, 0.1);
    q1.init(rng_);
    q2.init(rng_);
    q1_target = q1;
    q2_target = q2;
    actor_opt_ = Adam(actor.num_params());
    q1_opt_ = Adam(q1.num_params());
    q2_opt_ = Adam(q2.num_params());
    alpha_opt_ = Adam(1);
    log_alpha_ = std::log(config_.temperature);
}

double SacAgent::temperature() const { return std::exp(log_alpha_); }

double SacAgent::target_entropy() const {
    return config_.target_entropy != 0.0 ? config_.target_entropy : -static_cast<double>(act_dim_);
}

ActionSample SacAgent::act(std::span<const double> obs, bool deterministic) {
    return sample_action(actor, config_.head, obs, rng_, deterministic);
}

Matrix SacAgent::critic_input(const Matrix& obs, const Matrix& action) const {
    Matrix in(obs.rows() + action.rows(), obs.cols());
    in.topRows(obs.rows()) = obs;
    in.bottomRows(action.rows()) = action;
    return in;
}

Eigen::RowVectorXd SacAgent::critic_target(const Batch& batch) {
    const SquashedBatch next = sample_squashed(config_.head, actor.forward(batch.next_obs), rng_);
    const Matrix in = critic_input(batch.next_obs, next.action);
    const Eigen::RowVectorXd t1 = q1_target.forward(in).row(0);
    const Eigen::RowVectorXd t2 = q2_target.forward(in).row(0);
    const double alpha = temperature();
    Eigen::RowVectorXd y(batch.reward.size());
    for (Eigen::Index b = 0; b < y.size(); ++b) {
        const double soft = std::min(t1(b), t2(b)) - alpha * next.log_prob(b);
        y(b) = batch.reward(b) + config_.gamma * (1.0 - batch.done(b)) * soft;
    }
    return y;
}

SacLosses SacAgent::update(const Batch& batch) {
    SacLosses losses;
    const Eigen::Index B = batch.obs.cols();
    const double inv_b = 1.0 / static_cast<double>(B);

    // critics
    const Eigen::RowVectorXd y = critic_target(batch);
    const Matrix in = critic_input(batch.obs, batch.action);
    auto fit_critic = [&](Mlp& q, Adam& opt) {
        Tape tape;
        const Eigen::RowVectorXd pred = q.forward(in, tape).row(0);
        const Eigen::RowVectorXd err = pred - y;
        ParamVector grads(q.num_params(), 0.0);
        q.backward(tape, Matrix(2.0 * inv_b * err), grads);
        opt.step(q.params(), grads, config_.lr_critic);
        return err.squaredNorm() * inv_b;
    };
    losses.critic1 = fit_critic(q1, q1_opt_);
    losses.critic2 = fit_critic(q2, q2_opt_);

    // actor: minimise E[alpha log pi(a|s) - min Q(s,a)], a reparameterised
    const double alpha = temperature();
    Tape actor_tape;
    const Matrix head_out = actor.forward(batch.obs, actor_tape);
    const SquashedBatch s = sample_squashed(config_.head, head_out, rng_);
    const Matrix qin = critic_input(batch.obs, s.action);
    Tape t1, t2;
    const Eigen::RowVectorXd v1 = q1.forward(qin, t1).row(0);
    const Eigen::RowVectorXd v2 = q2.forward(qin, t2).row(0);
    Matrix g1 = Matrix::Zero(1, B);
    Matrix g2 = Matrix::Zero(1, B);
    double actor_loss = 0.0;
    for (Eigen::Index b = 0; b < B; ++b) {
        const bool first = v1(b) <= v2(b);
        (first ? g1 : g2)(0, b) = -inv_b;
        actor_loss += alpha * s.log_prob(b) - std::min(v1(b), v2(b));
    }
    const Matrix dq_in = q1.backward(t1, g1, {}) + q2.backward(t2, g2, {});
    const Matrix grad_action = dq_in.bottomRows(act_dim_);
    const Eigen::RowVectorXd grad_logp = Eigen::RowVectorXd::Constant(B, alpha * inv_b);
    const Matrix head_grad = squashed_backward(s, grad_action, grad_logp);
    ParamVector agrads(actor.num_params(), 0.0);
    actor.backward(actor_tape, head_grad, agrads);
    actor_opt_.step(actor.params(), agrads, config_.lr_actor);
    losses.actor = actor_loss * inv_b;
    losses.mean_log_prob = s.log_prob.mean();

    if (config_.auto_temperature) {
        const double gap = losses.mean_log_prob + target_entropy();
        losses.temperature = -log_alpha_ * gap;
        double la[1] = {log_alpha_};
        const double g[1] = {-gap};
        alpha_opt_.step(la, g, config_.lr_temperature);
        log_alpha_ = la[0];
    }

    polyak_update(q1_target, q1, config_.polyak);
    polyak_update(q2_target, q2, config_.polyak);
    ++updates_;
    return losses;
}

nlohmann::json mlp_to_json(const Mlp& net) {
    nlohmann::json acts = nlohmann::json::array();
    for (auto a : net.activations()) acts.push_back(to_string(a));
    return {{"widths", net.widths()},
            {"activations", acts},
            {"params", std::vector<double>(net.params().begin(), net.params().end())}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
    std::vector<Activation> acts;
    for (const auto& a : j.at("activations")) acts.push_back(parse_activation(a.get<std::string>()));
    Mlp net(j.at("widths").get<std::vector<int>>(), std::move(acts));
    auto p = j.at("params").get<std::vector<double>>();
    if (p.size() != net.num_params()) throw InvalidArgument("checkpoint parameter count mismatch");
    net.params().assign(p.begin(), p.end());
    return net;
}

nlohmann::json adam_to_json(const Adam& opt) {
    return {{"t", opt.steps()},
            {"beta1", opt.config().beta1},
            {"beta2", opt.config().beta2},
            {"eps", opt.config().eps},
            {"m", opt.first_moment()},
            {"v", opt.second_moment()}};
}

Adam adam_from_json(const nlohmann::json& j) {
    auto m = j.at("m").get<std::vector<double>>();
    auto v = j.at("v").get<std::vector<double>>();
    Adam opt(m.size(), AdamConfig{j.at("beta1").get<double>(), j.at("beta2").get<double>(), j.at("eps").get<double>()});
    opt.restore(j.at("t").get<long>(), std::move(m), std::move(v));
    return opt;
}

nlohmann::json rng_to_json(const Rng& rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

Rng rng_from_json(const nlohmann::json& j) {
    Rng rng;
    std::istringstream is(j.get<std::string>());
    is >> rng;
    if (!is) throw InvalidArgument("malformed RNG state in checkpoint");
    return rng;
}

namespace {

nlohmann::json sac_config_json(const SacConfig& c) {
    return {{"gamma", c.gamma},
            {"temperature", c.temperature},
            {"auto_temperature", c.auto_temperature},
            {"target_entropy", c.target_entropy},
            {"polyak", c.polyak},
            {"lr_actor", c.lr_actor},
            {"lr_critic", c.lr_critic},
            {"lr_temperature", c.lr_temperature},
            {"batch_size", c.batch_size},
            {"buffer_size", c.buffer_size},
            {"warmup_steps", c.warmup_steps},
            {"hidden", c.hidden},
            {"layers", c.layers},
            {"update_every", c.update_every},
            {"activation", to_string(c.activation)},
            {"log_std_min", c.head.log_std_min},
            {"log_std_max", c.head.log_std_max}};
}

SacConfig sac_config_from_json(const nlohmann::json& j) {
    SacConfig c;
    c.gamma = j.at("gamma").get<double>();
    c.temperature = j.at("temperature").get<double>();
    c.auto_temperature = j.at("auto_temperature").get<bool>();
    c.target_entropy = j.at("target_entropy").get<double>();
    c.polyak = j.at("polyak").get<double>();
    c.lr_actor = j.at("lr_actor").get<double>();
    c.lr_critic = j.at("lr_critic").get<double>();
    c.lr_temperature = j.at("lr_temperature").get<double>();
    c.batch_size = j.at("batch_size").get<int>();
    c.buffer_size = j.at("buffer_size").get<int>();
    c.warmup_steps = j.at("warmup_steps").get<int>();
    c.hidden = j.at("hidden").get<int>();
    c.layers = j.at("layers").get<int>();
    c.update_every = j.at("update_every").get<int>();
    c.activation = parse_activation(j.at("activation").get<std::string>());
    c.head.log_std_min = j.at("log_std_min").get<double>();
    c.head.log_std_max = j.at("log_std_max").get<double>();
    return c;
}

} // namespace

nlohmann::json SacAgent::to_json() const {
    return {{"obs_dim", obs_dim_},
            {"act_dim", act_dim_},
            {"config", sac_config_json(config_)},
            {"actor", mlp_to_json(actor)},
            {"q1", mlp_to_json(q1)},
            {"q2", mlp_to_json(q2)},
            {"q1_target", mlp_to_json(q1_target)},
            {"q2_target", mlp_to_json(q2_target)},
            {"actor_opt", adam_to_json(actor_opt_)},
            {"q1_opt", adam_to_json(q1_opt_)},
            {"q2_opt", adam_to_json(q2_opt_)},
            {"alpha_opt", adam_to_json(alpha_opt_)},
            {"log_alpha", log_alpha_},
            {"updates", updates_},
            {"rng", rng_to_json(rng_)}};
}

SacAgent SacAgent::from_json(const nlohmann::json& j) {
    SacAgent a(j.at("obs_dim").get<int>(), j.at("act_dim").get<int>(), sac_config_from_json(j.at("config")), 0);
    a.actor = mlp_from_json(j.at("actor"));
    a.q1 = mlp_from_json(j.at("q1"));
    a.q2 = mlp_from_json(j.at("q2"));
    a.q1_target = mlp_from_json(j.at("q1_target"));
    a.q2_target = mlp_from_json(j.at("q2_target"));
    a.actor_opt_ = adam_from_json(j.at("actor_opt"));
    a.q1_opt_ = adam_from_json(j.at("q1_opt"));
    a.q2_opt_ = adam_from_json(j.at("q2_opt"));
    a.alpha_opt_ = adam_from_json(j.at("alpha_opt"));
    a.log_alpha_ = j.at("log_alpha").get<double>();
    a.updates_ = j.at("updates").get<long>();
    a.rng_ = rng_from_json(j.at("rng"));
    return a;
}

} // namespace rris
