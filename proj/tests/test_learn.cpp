#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rris/env.hpp"
#include "rris/error.hpp"
#include "rris/heuristics.hpp"
#include "rris/mlp.hpp"
#include "rris/policy.hpp"
#include "rris/ppo.hpp"
#include "rris/sac.hpp"

using namespace rris;

namespace {

void randomize(Mlp& net, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& p : net.params()) p = u(rng);
}

Matrix random_matrix(int rows, int cols, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = u(rng);
    return m;
}

// Plain loops over the documented parameter layout.
Matrix oracle_forward(const Mlp& net, const Matrix& x) {
    Matrix a = x;
    std::size_t off = 0;
    const auto& w = net.widths();
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        const int in = w[l];
        const int out = w[l + 1];
        Matrix z(out, a.cols());
        for (int c = 0; c < a.cols(); ++c) {
            for (int o = 0; o < out; ++o) {
                double s = net.params()[off + static_cast<std::size_t>(in * out + o)];
                for (int i = 0; i < in; ++i) s += net.params()[off + static_cast<std::size_t>(i * out + o)] * a(i, c);
                switch (net.activations()[l]) {
                    case Activation::identity: z(o, c) = s; break;
                    case Activation::tanh: z(o, c) = std::tanh(s); break;
                    case Activation::relu: z(o, c) = s > 0 ? s : 0.0; break;
                }
            }
        }
        off += static_cast<std::size_t>(in * out + out);
        a = z;
    }
    return a;
}

// Scalar loss sum(c .* net(x)) for a fixed random weighting c.
double weighted_loss(const Mlp& net, const Matrix& x, const Matrix& c) { return net.forward(x).cwiseProduct(c).sum(); }

Mlp constant_head(double mean, double log_std) {
    Mlp net({1, 2}, {Activation::identity});
    std::fill(net.params().begin(), net.params().end(), 0.0);
    net.bias(0)(0) = mean;
    net.bias(0)(1) = log_std;
    return net;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Batch single(const std::vector<double>& obs, const std::vector<double>& act, double r, const std::vector<double>& next,
             bool done) {
    ReplayBuffer rb(1, static_cast<int>(obs.size()), static_cast<int>(act.size()));
    rb.add(obs, act, r, next, done);
    return rb.at(0);
}

} // namespace

TEST_CASE("identity network passes its input through") {
    Mlp net({3, 3}, {Activation::identity});
    std::fill(net.params().begin(), net.params().end(), 0.0);
    net.weight(0) = Matrix::Identity(3, 3);
    const std::vector<double> x{0.3, -1.5, 2.0};
    const Vector y = net.forward(std::span<const double>(x));
    for (int i = 0; i < 3; ++i) CHECK(y(i) == x[static_cast<std::size_t>(i)]);
}

TEST_CASE("a zero-weight tanh unit outputs zero") {
    Mlp net({4, 1}, {Activation::tanh});
    std::fill(net.params().begin(), net.params().end(), 0.0);
    Rng rng(1);
    const Matrix x = random_matrix(4, 20, rng) * 100.0;
    CHECK(net.forward(x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward pass matches an explicit loop") {
    Rng rng(2);
    for (Activation act : {Activation::tanh, Activation::relu, Activation::identity}) {
        Mlp net = make_mlp(5, 16, 2, 3, act);
        randomize(net, rng);
        const Matrix x = random_matrix(5, 7, rng);
        CHECK((net.forward(x) - oracle_forward(net, x)).cwiseAbs().maxCoeff() < 1e-10);
    }
    Mlp net = make_mlp(5, 16, 2, 3, Activation::tanh);
    CHECK_THROWS_AS(net.forward(Matrix::Zero(4, 1)), InvalidArgument);
}

TEST_CASE("gradients match central finite differences") {
    Rng rng(3);
    std::uniform_int_distribution<int> width(1, 12);
    std::uniform_int_distribution<int> depth(1, 3);
    std::uniform_int_distribution<int> kind(0, 2);
    for (int cfg = 0; cfg < 20; ++cfg) {
        std::vector<int> w{width(rng)};
        std::vector<Activation> acts;
        const int layers = depth(rng);
        for (int l = 0; l < layers; ++l) {
            w.push_back(width(rng));
            acts.push_back(l + 1 == layers ? Activation::identity : static_cast<Activation>(kind(rng)));
        }
        Mlp net(w, acts);
        randomize(net, rng);
        const Matrix x = random_matrix(w.front(), 3, rng);
        const Matrix c = random_matrix(w.back(), 3, rng);
        Tape tape;
        net.forward(x, tape);
        ParamVector g(net.num_params(), 0.0);
        const Matrix gin = net.backward(tape, c, g);
        const double h = 1e-5;
        for (std::size_t i = 0; i < net.num_params(); ++i) {
            const double keep = net.params()[i];
            net.params()[i] = keep + h;
            const double up = weighted_loss(net, x, c);
            net.params()[i] = keep - h;
            const double down = weighted_loss(net, x, c);
            net.params()[i] = keep;
            const double fd = (up - down) / (2 * h);
            CHECK(std::fabs(fd - g[i]) <= 1e-4 * std::max(1.0, std::fabs(fd)));
        }
        for (int r = 0; r < x.rows(); ++r) {
            Matrix xp = x;
            Matrix xm = x;
            xp(r, 1) += h;
            xm(r, 1) -= h;
            const double fd = (weighted_loss(net, xp, c) - weighted_loss(net, xm, c)) / (2 * h);
            CHECK(std::fabs(fd - gin(r, 1)) <= 1e-4 * std::max(1.0, std::fabs(fd)));
        }
    }
}

TEST_CASE("linear layer gradient is an outer product") {
    Rng rng(4);
    Mlp net({3, 2}, {Activation::identity});
    randomize(net, rng);
    const Matrix x = random_matrix(3, 1, rng);
    const Matrix c = random_matrix(2, 1, rng);
    Tape tape;
    net.forward(x, tape);
    ParamVector g(net.num_params(), 0.0);
    net.backward(tape, c, g);
    for (int i = 0; i < 3; ++i)
        for (int o = 0; o < 2; ++o) CHECK(g[static_cast<std::size_t>(i * 2 + o)] == doctest::Approx(c(o) * x(i)));
    CHECK(g[6] == doctest::Approx(c(0)));
    CHECK(g[7] == doctest::Approx(c(1)));
}

TEST_CASE("zero upstream gradient and missing tape") {
    Rng rng(5);
    Mlp net = make_mlp(4, 8, 2, 2, Activation::tanh);
    randomize(net, rng);
    Tape tape;
    net.forward(random_matrix(4, 5, rng), tape);
    ParamVector g(net.num_params(), 0.0);
    net.backward(tape, Matrix::Zero(2, 5), g);
    for (double v : g) CHECK(v == 0.0);
    CHECK_THROWS_AS(net.backward(Tape{}, Matrix::Zero(2, 5), g), InvalidState);
}

TEST_CASE("Adam leaves parameters alone under a zero gradient") {
    Adam opt(3);
    std::vector<double> p{1.0, -2.0, 0.5};
    const std::vector<double> g(3, 0.0);
    for (int i = 0; i < 10; ++i) opt.step(p, g, 1e-2);
    CHECK(p == std::vector<double>{1.0, -2.0, 0.5});
}

TEST_CASE("Adam steps approach lr times the gradient sign") {
    Adam opt(2);
    std::vector<double> p{0.0, 0.0};
    const std::vector<double> g{3.0, -0.01};
    const double lr = 1e-3;
    std::vector<double> before;
    for (int i = 0; i < 2000; ++i) {
        before = p;
        opt.step(p, g, lr);
    }
    CHECK(p[0] - before[0] == doctest::Approx(-lr).epsilon(1e-4));
    CHECK(p[1] - before[1] == doctest::Approx(lr).epsilon(1e-4));
}

TEST_CASE("Adam minimises a quadratic") {
    Adam opt(2);
    std::vector<double> p{3.0, -4.0};
    for (int i = 0; i < 5000; ++i) {
        const std::vector<double> g{2.0 * (p[0] - 1.0), 20.0 * (p[1] + 0.5)};
        opt.step(p, g, 1e-2);
    }
    CHECK(std::fabs(p[0] - 1.0) < 1e-6);
    CHECK(std::fabs(p[1] + 0.5) < 1e-6);
}

TEST_CASE("squashed samples average to the expected tanh") {
    const double mu = 0.4;
    const double ls = -0.7;
    const double sd = std::exp(ls);
    const Mlp net = constant_head(mu, ls);
    const GaussianPolicyHead head;
    Rng rng(6);
    const std::vector<double> obs{0.0};
    const int n = 100000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = sample_action(net, head, obs, rng).action[0];
        CHECK(a > -1.0);
        CHECK(a < 1.0);
        sum += a;
        sq += a * a;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    // E[tanh(mu + sd z)] by midpoint quadrature over the normal density
    double expect = 0.0;
    const int m = 200000;
    const double lo = -10.0;
    const double hi = 10.0;
    const double dz = (hi - lo) / m;
    for (int i = 0; i < m; ++i) {
        const double z = lo + (i + 0.5) * dz;
        expect += std::tanh(mu + sd * z) * std::exp(-0.5 * z * z) / std::sqrt(2 * kPi) * dz;
    }
    CHECK(std::fabs(mean - expect) < 3 * se);
    CHECK(sample_action(net, head, obs, rng, true).action[0] == doctest::Approx(std::tanh(mu)));
}

TEST_CASE("log-probability matches a histogram of samples") {
    const double mu = 0.3;
    const double sd = std::exp(-0.2);
    const Mlp net = constant_head(mu, -0.2);
    const GaussianPolicyHead head;
    Rng rng(7);
    const std::vector<double> obs{0.0};
    const int n = 1000000;
    const int bins = 40;
    const double width = 2.0 / bins;
    std::vector<int> count(bins, 0);
    std::vector<double> dens(bins, 0.0);
    for (int i = 0; i < n; ++i) {
        const ActionSample s = sample_action(net, head, obs, rng);
        const double a = s.action[0];
        const int b = std::min(bins - 1, static_cast<int>((a + 1.0) / width));
        ++count[static_cast<std::size_t>(b)];
        // the density at the bin centre, read off the sample closest to it
        const double centre = -1.0 + (b + 0.5) * width;
        if (std::fabs(a - centre) < 1e-3) dens[static_cast<std::size_t>(b)] = std::exp(s.log_prob);
    }
    int checked = 0;
    for (int b = 1; b + 1 < bins; ++b) {
        const double lo = -1.0 + b * width;
        const double hi = lo + width;
        const double mass = normal_cdf((std::atanh(hi) - mu) / sd) - normal_cdf((std::atanh(lo) - mu) / sd);
        if (mass < 0.01 || dens[static_cast<std::size_t>(b)] == 0.0) continue;
        const double emp = static_cast<double>(count[static_cast<std::size_t>(b)]) / n / width;
        CHECK(std::fabs(dens[static_cast<std::size_t>(b)] - emp) / emp < 0.05);
        ++checked;
    }
    CHECK(checked >= 15);
}

TEST_CASE("tiny standard deviations stay finite") {
    const Mlp net = constant_head(0.5, -50.0);
    const GaussianPolicyHead head;
    Rng rng(8);
    const std::vector<double> obs{0.0};
    for (int i = 0; i < 1000; ++i) {
        const ActionSample s = sample_action(net, head, obs, rng);
        CHECK(std::isfinite(s.log_prob));
        CHECK(s.action[0] == doctest::Approx(std::tanh(0.5)).epsilon(1e-6));
    }
    const Mlp wild = constant_head(40.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const ActionSample s = sample_action(wild, head, obs, rng);
        CHECK(std::isfinite(s.log_prob));
        CHECK(std::fabs(s.action[0]) < 1.0);
    }
}

TEST_CASE("myopic critic target is the reward") {
    SacConfig c;
    c.gamma = 0.0;
    c.temperature = 0.0;
    c.hidden = 16;
    SacAgent agent(3, 2, c, 1);
    ReplayBuffer rb(10, 3, 2);
    Rng rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 10; ++i) {
        const std::vector<double> o{u(rng), u(rng), u(rng)};
        rb.add(o, std::vector<double>{u(rng), u(rng)}, 5.0 * u(rng), o, i % 3 == 0);
    }
    const Batch b = rb.sample(10, rng);
    const Eigen::RowVectorXd y = agent.critic_target(b);
    for (int i = 0; i < 10; ++i) CHECK(y(i) == b.reward(i));
}

TEST_CASE("a critic fitted to one transition reaches its target") {
    SacConfig c;
    c.hidden = 32;
    c.lr_critic = 1e-3;
    SacAgent agent(2, 1, c, 2);
    const Batch b = single({0.2, -0.4}, {0.5}, 1.7, {0.1, 0.1}, true);
    for (int i = 0; i < 3000; ++i) agent.update(b);
    Matrix in(3, 1);
    in << 0.2, -0.4, 0.5;
    CHECK(std::fabs(agent.q1.forward(in)(0, 0) - 1.7) < 1e-3);
    CHECK(std::fabs(agent.q2.forward(in)(0, 0) - 1.7) < 1e-3);
}

TEST_CASE("a large temperature widens the policy") {
    SacConfig c;
    c.hidden = 16;
    c.temperature = 5.0;
    SacAgent agent(1, 2, c, 3);
    // start narrow
    const std::size_t last = agent.actor.num_layers() - 1;
    agent.actor.bias(last)(2) = -2.0;
    agent.actor.bias(last)(3) = -2.0;
    ReplayBuffer rb(256, 1, 2);
    Rng rng(10);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 256; ++i) {
        const double a0 = u(rng);
        const double a1 = u(rng);
        rb.add(std::vector<double>{1.0}, std::vector<double>{a0, a1}, -(a0 * a0 + a1 * a1) * 0.1,
               std::vector<double>{1.0}, true);
    }
    auto mean_log_std = [&] {
        Matrix in(1, 1);
        in << 1.0;
        return agent.actor.forward(in).bottomRows(2).mean();
    };
    const double before = mean_log_std();
    for (int i = 0; i < 1000; ++i) agent.update(rb.sample(64, rng));
    CHECK(mean_log_std() > before);
}

TEST_CASE("swapping the twin critics leaves the target unchanged") {
    SacConfig c;
    c.hidden = 16;
    SacAgent a(3, 2, c, 4);
    SacAgent b = a;
    std::swap(b.q1_target, b.q2_target);
    std::swap(b.q1, b.q2);
    ReplayBuffer rb(20, 3, 2);
    Rng rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 20; ++i) {
        rb.add(std::vector<double>{u(rng), u(rng), u(rng)}, std::vector<double>{u(rng), u(rng)}, u(rng),
               std::vector<double>{u(rng), u(rng), u(rng)}, false);
    }
    const Batch batch = rb.sample(20, rng);
    const Eigen::RowVectorXd ya = a.critic_target(batch);
    const Eigen::RowVectorXd yb = b.critic_target(batch);
    for (int i = 0; i < 20; ++i) CHECK(ya(i) == yb(i));
}

TEST_CASE("polyak blending is exact") {
    Rng rng(12);
    Mlp online = make_mlp(3, 8, 2, 1, Activation::tanh);
    Mlp target = online;
    randomize(online, rng);
    randomize(target, rng);
    const ParamVector old = target.params();
    const double beta = 0.005;
    polyak_update(target, online, beta);
    for (std::size_t i = 0; i < old.size(); ++i) CHECK(target.params()[i] == beta * online.params()[i] + (1 - beta) * old[i]);
}

TEST_CASE("replay buffer evicts the oldest transition") {
    ReplayBuffer rb(3, 1, 1);
    for (int i = 0; i < 5; ++i) {
        const double v = i;
        rb.add(std::vector<double>{v}, std::vector<double>{v}, v, std::vector<double>{v}, false);
    }
    CHECK(rb.size() == 3);
    CHECK(rb.at(0).reward(0) == 2.0);
    CHECK(rb.at(2).reward(0) == 4.0);
    Rng rng(13);
    for (int t = 0; t < 100; ++t) {
        const Batch b = rb.sample(3, rng);
        std::vector<double> r{b.reward(0), b.reward(1), b.reward(2)};
        std::sort(r.begin(), r.end());
        CHECK(r == std::vector<double>{2.0, 3.0, 4.0});
    }
}

TEST_CASE("SAC training is deterministic and round-trips through JSON") {
    SacConfig c;
    c.hidden = 16;
    c.auto_temperature = true;
    auto run = [&] {
        SacAgent agent(2, 2, c, 77);
        ReplayBuffer rb(100, 2, 2);
        Rng rng(14);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int i = 0; i < 100; ++i) {
            const std::vector<double> o{u(rng), u(rng)};
            const auto a = agent.act(o).action;
            rb.add(o, a, -a[0] * a[0], o, false);
        }
        for (int i = 0; i < 50; ++i) agent.update(rb.sample(32, rng));
        return agent;
    };
    SacAgent a = run();
    SacAgent b = run();
    CHECK(a.to_json().dump() == b.to_json().dump());
    SacAgent back = SacAgent::from_json(a.to_json());
    CHECK(back.to_json().dump() == a.to_json().dump());
    const std::vector<double> o{0.3, -0.3};
    CHECK(back.act(o).action == a.act(o).action);
}

namespace {

PpoAgent bandit_agent(std::uint64_t seed, bool normalize) {
    PpoConfig c;
    c.hidden = 16;
    c.normalize_advantages = normalize;
    c.epochs = 1;
    c.minibatch = 64;
    return PpoAgent(1, 1, c, seed);
}

Rollout on_policy(PpoAgent& agent, int n, double adv) {
    Rollout r;
    const std::vector<double> o{1.0};
    for (int i = 0; i < n; ++i) r.add(o, agent.act(o), 0.0, true);
    r.advantage.assign(r.size(), adv);
    r.ret.assign(r.size(), 0.0);
    return r;
}

} // namespace

TEST_CASE("zero advantages leave the policy untouched") {
    PpoAgent agent = bandit_agent(1, true);
    const auto actor = agent.actor.params();
    const auto ls = agent.log_std;
    Rollout r = on_policy(agent, 64, 0.0);
    ppo_update(agent, r);
    CHECK(agent.actor.params() == actor);
    CHECK(agent.log_std == ls);
}

TEST_CASE("ratios beyond the clip range contribute no gradient") {
    for (double adv : {1.0, -1.0}) {
        PpoAgent agent = bandit_agent(2, false);
        Rollout r = on_policy(agent, 64, adv);
        // old log-probs shifted so the ratio is e (or 1/e) and the clipped branch is the minimum
        for (double& lp : r.log_prob) lp += adv > 0 ? -1.0 : 1.0;
        const auto actor = agent.actor.params();
        const auto ls = agent.log_std;
        const PpoLosses l = ppo_update(agent, r);
        CHECK(l.clipped_fraction == 1.0);
        CHECK(agent.actor.params() == actor);
        CHECK(agent.log_std == ls);
    }
    PpoAgent agent = bandit_agent(2, false);
    Rollout r = on_policy(agent, 64, 1.0);
    const auto actor = agent.actor.params();
    ppo_update(agent, r);
    CHECK(agent.actor.params() != actor);
}

TEST_CASE("PPO learns a two-armed bandit") {
    PpoConfig c;
    c.hidden = 16;
    c.minibatch = 64;
    PpoAgent agent(1, 1, c, 3);
    const std::vector<double> o{1.0};
    Rng noise(15);
    std::normal_distribution<double> nd(0.0, 0.1);
    for (int it = 0; it < 60; ++it) {
        Rollout r;
        for (int i = 0; i < 256; ++i) {
            const PpoSample s = agent.act(o);
            r.add(o, s, (s.action[0] > 0 ? 1.0 : 0.0) + nd(noise), true);
        }
        compute_gae(r, c.gamma, c.gae_lambda, 0.0);
        ppo_update(agent, r);
    }
    int good = 0;
    for (int i = 0; i < 1000; ++i) good += agent.act(o).action[0] > 0;
    CHECK(good >= 950);
}

TEST_CASE("GAE on single-step episodes is reward minus value") {
    Rollout r;
    PpoSample s;
    s.action = {0.0};
    s.pre_tanh = {0.0};
    const std::vector<double> o{0.0};
    for (int i = 0; i < 4; ++i) {
        s.value = 0.5 * i;
        r.add(o, s, 1.0 + i, true);
    }
    compute_gae(r, 0.9, 0.95, 123.0);
    for (int i = 0; i < 4; ++i) {
        CHECK(r.advantage[static_cast<std::size_t>(i)] == doctest::Approx(1.0 + i - 0.5 * i));
        CHECK(r.ret[static_cast<std::size_t>(i)] == doctest::Approx(1.0 + i));
    }
}

TEST_CASE("PPO checkpoints round-trip") {
    PpoAgent a = bandit_agent(4, true);
    const PpoAgent b = PpoAgent::from_json(a.to_json());
    CHECK(b.to_json().dump() == a.to_json().dump());
}

namespace {

EnvConfig heuristic_config(int k) {
    EnvConfig c;
    c.num_ues = k;
    c.num_elements = 8;
    return c;
}

} // namespace

TEST_CASE("local-only heuristic earns the local plateau") {
    const EnvConfig c = heuristic_config(5);
    Env env(c);
    HeuristicPolicy p(HeuristicKind::local_only, c, 1);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        env.reset(seed);
        double ret = 0.0;
        double pen = 0.0;
        while (!env.done()) {
            const StepResult r = env.step(env.decode_action(p.act(env)));
            ret += r.reward.total;
            pen += r.reward.penalties();
        }
        CHECK(pen == 0.0);
        CHECK(std::fabs(ret + 10.8) <= 1e-9);
    }
}

TEST_CASE("fixed orientation maximises the centre pattern") {
    EnvConfig c = heuristic_config(1);
    Env env(c);
    env.reset(1);
    const Interval b = env.rotation_interval();
    const int n = 10000;
    double best = -1.0;
    double arg = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double d = b.lo + b.width() * i / n;
        // pattern product recomputed from raw angles
        RisPose pose = c.ris;
        pose.rotation = d;
        const std::vector<Position> ue{c.mobility.region_center};
        const AngleSet a = angles_from_geometry(pose, c.bs, ue);
        const double v = a.indicator_k[0] ? std::pow(std::sin(a.theta_k[0]) * std::sin(a.theta_B), 2.0) : 0.0;
        if (v > best) {
            best = v;
            arg = d;
        }
    }
    HeuristicPolicy p(HeuristicKind::fixed_orientation, c, 1);
    CHECK(std::fabs(p.rotation() - arg) <= b.width() / n);
    CHECK(pattern_at(c, c.mobility.region_center, p.rotation()) >= best - 1e-9);
    const EnvAction act = env.decode_action(p.act(env));
    CHECK(act.rotation == doctest::Approx(p.rotation()).epsilon(1e-12));
}

TEST_CASE("random orientation is uniform over its interval") {
    const EnvConfig c = heuristic_config(2);
    Env env(c);
    env.reset(1);
    HeuristicPolicy p(HeuristicKind::random_orientation, c, 5);
    const Interval b = env.rotation_interval();
    const int n = 10000;
    std::vector<double> x;
    x.reserve(n);
    for (int i = 0; i < n; ++i) x.push_back((env.decode_action(p.act(env)).rotation - b.lo) / b.width());
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) d = std::max({d, (i + 1.0) / n - x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i)] - double(i) / n});
    // Kolmogorov-Smirnov critical value for p = 0.01
    CHECK(d < 1.628 / std::sqrt(double(n)));
}

TEST_CASE("random phase heuristic covers the codebook") {
    const EnvConfig c = heuristic_config(2);
    Env env(c);
    env.reset(1);
    HeuristicPolicy p(HeuristicKind::random_phase, c, 6);
    const auto book = phase_codebook(c.phase_bits);
    std::vector<int> hits(book.size(), 0);
    for (int i = 0; i < 1000; ++i) {
        for (double ph : env.decode_action(p.act(env)).phases.phases) {
            ++hits[static_cast<std::size_t>(std::find(book.begin(), book.end(), ph) - book.begin())];
        }
    }
    for (int h : hits) CHECK(h > 1500);
    CHECK(parse_heuristic("fixed-orientation") == HeuristicKind::fixed_orientation);
    CHECK(to_string(HeuristicKind::random_phase) == "random-phase");
    CHECK_THROWS_AS(parse_heuristic("nope"), InvalidArgument);
}
