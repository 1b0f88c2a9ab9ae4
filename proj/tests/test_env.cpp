#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rris/env.hpp"
#include "rris/error.hpp"

using namespace rris;

namespace {

EnvConfig small_config(int k = 5, int n = 8) {
    EnvConfig c;
    c.num_ues = k;
    c.num_elements = n;
    return c;
}

EnvAction action_with(const Env& env, std::vector<double> alphas) {
    EnvAction a;
    a.rotation = env.fixed_rotation();
    a.phases.bits = env.config().phase_bits;
    a.phases.phases.assign(static_cast<std::size_t>(env.config().num_elements), 0.0);
    a.alphas = std::move(alphas);
    return a;
}

std::vector<double> random_raw(const Env& env, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> raw(static_cast<std::size_t>(env.config().action_dim()));
    for (double& r : raw) r = u(rng);
    return raw;
}

} // namespace

TEST_CASE("reset is deterministic per seed") {
    Env a(small_config());
    Env b(small_config());
    const EnvState s1 = a.reset(42);
    const EnvState s2 = b.reset(42);
    CHECK(s1.distances == s2.distances);
    CHECK(s1.angles == s2.angles);
    CHECK(s1.slot_index == 1);
    for (double c : s1.cum_alpha) CHECK(c == 0.0);
    const EnvState s3 = a.reset(43);
    CHECK(s3.distances != s1.distances);
}

TEST_CASE("initial distances respect the region bounds") {
    EnvConfig c = small_config();
    Env env(c);
    const double dc = distance(c.mobility.region_center, c.ris.position);
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        for (double d : env.reset(seed).distances) {
            CHECK(d >= dc - c.mobility.region_radius - 1e-12);
            CHECK(d <= dc + c.mobility.region_radius + 1e-12);
        }
    }
}

TEST_CASE("observations are normalised") {
    Env env(small_config());
    std::mt19937_64 rng(1);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        env.reset(seed);
        while (!env.done()) {
            const auto obs = env.observe();
            REQUIRE(obs.size() == static_cast<std::size_t>(env.config().obs_dim()));
            const std::size_t k = static_cast<std::size_t>(env.config().num_ues);
            for (std::size_t i = 0; i < 2 * k; ++i) {
                CHECK(obs[i] >= 0.0);
                CHECK(obs[i] <= 1.0);
            }
            CHECK(obs.back() >= 0.0);
            CHECK(obs.back() <= 1.0);
            env.step(env.decode_action(random_raw(env, rng)));
        }
    }
}

TEST_CASE("decoding the lower corner") {
    Env env(small_config());
    env.reset(1);
    const std::vector<double> raw(static_cast<std::size_t>(env.config().action_dim()), -1.0);
    const EnvAction a = env.decode_action(raw);
    CHECK(a.rotation == doctest::Approx(env.theta0_B() - kPi));
    for (double p : a.phases.phases) CHECK(p == 0.0);
    for (double al : a.alphas) CHECK(al == 0.0);
}

TEST_CASE("decoding the upper corner") {
    for (int bits : {1, 2, 3}) {
        EnvConfig c = small_config();
        c.phase_bits = bits;
        Env env(c);
        env.reset(1);
        const std::vector<double> raw(static_cast<std::size_t>(env.config().action_dim()), 1.0);
        const EnvAction a = env.decode_action(raw);
        CHECK(a.rotation == doctest::Approx(env.theta0_B()));
        for (double p : a.phases.phases) CHECK(p == doctest::Approx((2.0 - std::pow(2.0, 1 - bits)) * kPi));
        for (double al : a.alphas) CHECK(al == 1.0);
    }
}

TEST_CASE("decoded actions stay in their domains") {
    Env env(small_config());
    env.reset(3);
    std::mt19937_64 rng(2);
    const auto book = phase_codebook(env.config().phase_bits);
    const Interval b = env.rotation_interval();
    for (int i = 0; i < 2000; ++i) {
        const EnvAction a = env.decode_action(random_raw(env, rng));
        CHECK(b.contains(a.rotation));
        CHECK_NOTHROW(a.phases.validate());
        for (double p : a.phases.phases) CHECK(std::find(book.begin(), book.end(), p) != book.end());
        for (double al : a.alphas) {
            CHECK(al >= 0.0);
            CHECK(al <= 1.0);
        }
    }
    CHECK_THROWS_AS(env.decode_action(std::vector<double>(3, 0.0)), InvalidArgument);
}

TEST_CASE("pinned rotation modes") {
    EnvConfig c = small_config();
    c.rotation_mode = RotationMode::fixed;
    Env fixed(c);
    fixed.reset(1);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) CHECK(fixed.decode_action(random_raw(fixed, rng)).rotation == fixed.fixed_rotation());
    c.rotation_mode = RotationMode::random;
    Env random(c);
    random.reset(1);
    double lo = 1e9;
    double hi = -1e9;
    for (int i = 0; i < 1000; ++i) {
        const double r = random.decode_action(std::vector<double>(random_raw(random, rng).size(), 0.0)).rotation;
        CHECK(random.rotation_interval().contains(r));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(hi - lo > 0.9 * random.rotation_interval().width());
}

TEST_CASE("an intermediate slot without offloading is free") {
    Env env(small_config());
    env.reset(5);
    const StepResult r = env.step(action_with(env, std::vector<double>(5, 0.0)));
    CHECK_FALSE(r.done);
    CHECK(r.reward.k_un == 0);
    CHECK(r.reward.p_theta == 0.0);
    CHECK(r.reward.total == 0.0);
}

TEST_CASE("local processing of five users costs 10.8 J") {
    Env env(small_config(5));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        env.reset(seed);
        double ret = 0.0;
        StepResult r;
        int steps = 0;
        while (!env.done()) {
            r = env.step(action_with(env, std::vector<double>(5, 0.0)));
            ret += r.reward.total;
            ++steps;
        }
        CHECK(steps == env.config().task.slots_Q - 1);
        CHECK(r.reward.penalties() == 0.0);
        CHECK(std::fabs(r.reward.total + 10.8) <= 1e-9);
        CHECK(std::fabs(ret + 10.8) <= 1e-9);
    }
}

TEST_CASE("overshooting the task counts as a violation") {
    // strong link, so only the overshoot can be at fault
    EnvConfig c = small_config(2);
    c.channel.rho0 = 1.0;
    Env strong(c);
    strong.reset(7);
    strong.step(action_with(strong, {0.9, 0.0}));
    CHECK(strong.state().cum_alpha[0] == doctest::Approx(0.9));
    const StepResult r = strong.step(action_with(strong, {0.2, 0.0}));
    CHECK(r.reward.k_un >= 1);
    CHECK(r.reward.p1 >= c.penalty_w);
    CHECK(r.ues[0].violated);
}

TEST_CASE("stepping a finished episode throws") {
    Env env(small_config());
    env.reset(1);
    while (!env.done()) env.step(action_with(env, std::vector<double>(5, 0.0)));
    CHECK_THROWS_AS(env.step(action_with(env, std::vector<double>(5, 0.0))), InvalidState);
}

TEST_CASE("reward decomposes into energy and penalties") {
    Env env(small_config(3));
    std::mt19937_64 rng(9);
    int clean = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        env.reset(seed);
        double ret = 0.0;
        double energy = 0.0;
        double penalties = 0.0;
        double ue_energy = 0.0;
        int violations = 0;
        while (!env.done()) {
            auto raw = random_raw(env, rng);
            // keep most offloads small so that some episodes are violation free
            for (int k = 0; k < 3; ++k) raw[1 + 8 + k] = -1.0 + 0.1 * (raw[1 + 8 + k] + 1.0);
            const StepResult r = env.step(env.decode_action(raw));
            ret += r.reward.total;
            energy += step_energy(r);
            penalties += r.reward.penalties();
            violations += r.reward.violations();
            for (const auto& u : r.ues) ue_energy += u.e_off + u.e_loc;
        }
        CHECK(ret == doctest::Approx(-(energy + penalties)).epsilon(1e-12));
        CHECK(ue_energy == doctest::Approx(energy).epsilon(1e-12));
        CHECK(penalties >= violations * env.config().penalty_w);
        if (penalties == 0.0) {
            ++clean;
            CHECK(std::fabs(ret + ue_energy) <= 1e-9);
        }
    }
    CHECK(clean > 0);
}

TEST_CASE("a violation never raises the reward") {
    EnvConfig c = small_config(2);
    c.channel.rho0 = 1.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Env a(c);
        Env b(c);
        a.reset(seed);
        b.reset(seed);
        a.step(action_with(a, {0.6, 0.1}));
        b.step(action_with(b, {0.6, 0.1}));
        const StepResult ok = a.step(action_with(a, {0.3, 0.1}));
        const StepResult bad = b.step(action_with(b, {0.5, 0.1}));
        CHECK(bad.reward.k_un == ok.reward.k_un + 1);
        CHECK(bad.reward.total <= ok.reward.total);
    }
}

TEST_CASE("replaying a seed reproduces the trajectory") {
    Env a(small_config(3));
    Env b(small_config(3));
    std::mt19937_64 r1(4);
    std::mt19937_64 r2(4);
    a.reset(99);
    b.reset(99);
    while (!a.done()) {
        const StepResult x = a.step(a.decode_action(random_raw(a, r1)));
        const StepResult y = b.step(b.decode_action(random_raw(b, r2)));
        CHECK(x.reward.total == y.reward.total);
        CHECK(x.state.distances == y.state.distances);
        CHECK(step_record_json(x, 0, x.state).dump() == step_record_json(y, 0, y.state).dump());
    }
    CHECK(b.done());
}

TEST_CASE("orientation penalty compares against a random draw") {
    Env env(small_config(3));
    std::mt19937_64 rng(5);
    int events = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        env.reset(seed);
        const StepResult r = env.step(env.decode_action(random_raw(env, rng)));
        const bool worse = r.random_metric > r.policy_metric;
        CHECK(r.reward.p_theta == (worse ? env.config().penalty_w : 0.0));
        events += worse;
    }
    // a random policy loses roughly half of the comparisons
    CHECK(events > 20);
    CHECK(events < 80);
}
