// Command-line front end: train, eval, sweep, trace, power-batch, selftest.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rris/config.hpp"
#include "rris/error.hpp"
#include "rris/runner.hpp"
#include "rris/selftest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::uint64_t seed = 1;
    std::string out = "out";
    std::string agent;
};

rris::ExperimentConfig load(const Common& c) {
    rris::ExperimentConfig cfg = c.config.empty() ? rris::parse_config("") : rris::load_config(c.config);
    if (!c.agent.empty()) cfg.agent = rris::parse_agent(c.agent);
    return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw rris::IoError("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw rris::IoError("write failed for '" + path.string() + "'");
}

json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw rris::IoError("cannot open '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw rris::IoError("'" + path + "' is not valid JSON: " + e.what());
    }
}

json local_checkpoint(const rris::ExperimentConfig& cfg, std::uint64_t seed) {
    rris::ExperimentConfig c = cfg;
    c.agent = rris::AgentKind::local;
    c.train.steps = 0;
    return rris::run_train(c, seed).checkpoint;
}

void add_common(CLI::App* sub, Common& c, bool with_agent) {
    sub->add_option("--config", c.config, "experiment configuration file");
    sub->add_option("--seed", c.seed, "base seed");
    sub->add_option("--out", c.out, "output directory");
    if (with_agent) {
        sub->add_option("--agent", c.agent, "agent kind")
            ->check(CLI::IsMember({"sac", "ppo", "local", "fixed", "random"}));
    }
}

int report(const std::string& kind, const std::string& message, const std::string& key = "") {
    json err{{"error", kind}, {"message", message}};
    if (!key.empty()) err["key"] = key;
    std::cerr << err.dump() << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
    // batch matrices are allocated every update; keep them off mmap
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
    CLI::App app{"rotatable-RIS edge-offloading simulator"};
    app.require_subcommand(1);
    Common c;

    auto* train = app.add_subcommand("train", "train an agent and write metrics.csv and checkpoint.json");
    add_common(train, c, true);

    std::string checkpoint;
    std::optional<int> episodes;
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint and write eval.json");
    add_common(eval, c, true);
    eval->add_option("--checkpoint", checkpoint, "checkpoint from train (optional for --agent local)");
    eval->add_option("--episodes", episodes, "evaluation episodes");

    std::string axis;
    std::optional<int> workers;
    auto* sweep = app.add_subcommand("sweep", "train and evaluate every sweep cell, write sweep_<axis>.csv");
    add_common(sweep, c, false);
    sweep->add_option("--axis", axis, "N or K")->check(CLI::IsMember({"N", "K"}));
    sweep->add_option("--workers", workers, "parallel workers");

    auto* trace = app.add_subcommand("trace", "dump per-slot orientation records to trace.jsonl");
    add_common(trace, c, false);
    trace->add_option("--checkpoint", checkpoint, "checkpoint from train")->required();
    trace->add_option("--episodes", episodes, "episodes to trace");

    int count = 1000;
    auto* power = app.add_subcommand("power-batch", "solve random power-control instances, write power.csv");
    power->add_option("--seed", c.seed, "seed");
    power->add_option("--out", c.out, "output directory");
    power->add_option("--count", count, "number of random instances");
    std::string input;
    power->add_option("--input", input, "CSV of instances: alpha_D, B_k, gain, noise, p_max, tau");

    auto* selftest = app.add_subcommand("selftest", "run the built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return report("usage", e.what());
    }

    try {
        if (*train) {
            const auto cfg = load(c);
            const rris::TrainOutput t = rris::run_train(cfg, c.seed);
            write_file(fs::path(c.out) / "metrics.csv", t.metrics_csv);
            write_file(fs::path(c.out) / "checkpoint.json", t.checkpoint.dump(1) + "\n");
            std::cerr << "trained " << rris::to_string(cfg.agent) << " seed " << c.seed << " in " << t.wall_seconds
                      << " s\n";
        } else if (*eval) {
            const auto cfg = load(c);
            json ckpt;
            if (!checkpoint.empty()) {
                ckpt = read_json(checkpoint);
            } else if (cfg.agent == rris::AgentKind::local) {
                ckpt = local_checkpoint(cfg, c.seed);
            } else {
                return report("usage", "--checkpoint is required unless --agent local");
            }
            const auto s = rris::run_eval(cfg, ckpt, c.seed, episodes.value_or(cfg.train.eval_episodes));
            write_file(fs::path(c.out) / "eval.json", s.to_json().dump(1) + "\n");
            std::cout << "mean energy " << s.mean_energy << " J, std " << s.std_energy << " J, violation rate "
                      << s.violation_rate << "\n";
        } else if (*sweep) {
            auto cfg = load(c);
            if (workers) cfg.train.workers = *workers;
            const rris::SweepAxis a = axis.empty() ? cfg.sweep.axis : rris::parse_axis(axis);
            const auto cells = rris::run_sweep_cells(cfg, a);
            write_file(fs::path(c.out) / ("sweep_" + rris::to_string(a) + ".csv"), rris::sweep_csv(cells));
        } else if (*trace) {
            const auto cfg = load(c);
            const auto lines = rris::orientation_trace(cfg, read_json(checkpoint), c.seed, episodes.value_or(1));
            std::string text;
            for (const auto& l : lines) text += l.dump() + "\n";
            write_file(fs::path(c.out) / "trace.jsonl", text);
        } else if (*power) {
            if (input.empty()) {
                write_file(fs::path(c.out) / "power.csv", rris::power_batch_csv(c.seed, count));
            } else {
                std::ifstream f(input);
                if (!f) throw rris::IoError("cannot open '" + input + "'");
                std::ostringstream ss;
                ss << f.rdbuf();
                write_file(fs::path(c.out) / "power.csv", rris::power_batch_from_csv(ss.str()));
            }
        } else if (*selftest) {
            return rris::run_selftest(std::cout) ? 0 : 1;
        }
    } catch (const rris::ConfigError& e) {
        return report(e.kind(), e.what(), e.key_path());
    } catch (const rris::Error& e) {
        return report(e.kind(), e.what());
    } catch (const std::exception& e) {
        return report("internal", e.what());
    }
    return 0;
}
