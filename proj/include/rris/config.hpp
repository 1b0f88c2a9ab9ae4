#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rris/env.hpp"
#include "rris/ppo.hpp"
#include "rris/sac.hpp"

namespace rris {

enum class AgentKind { sac, ppo, local, fixed, random };

std::string to_string(AgentKind k);
AgentKind parse_agent(const std::string& s);

enum class SweepAxis { elements, ues };

std::string to_string(SweepAxis a);
SweepAxis parse_axis(const std::string& s);

struct TrainSettings {
    long steps = 50000;
    int eval_episodes = 20;
    int metrics_every = 1;  // episodes between metrics rows
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    int workers = 1;
    double offload_share = 0.0;  // per-UE share offloaded by the orientation heuristics
};

struct SweepSettings {
    SweepAxis axis = SweepAxis::elements;
    std::vector<int> elements{8, 16, 24};
    std::vector<int> ues{1, 2, 3, 4, 5};
    std::vector<AgentKind> schemes{AgentKind::sac, AgentKind::fixed, AgentKind::local};
};

struct ExperimentConfig {
    EnvConfig env;
    AgentKind agent = AgentKind::sac;
    SacConfig sac;
    PpoConfig ppo;
    TrainSettings train;
    SweepSettings sweep;

    void validate() const;
};

/// Parses the INI-style experiment file. Values may carry units (dBm, dBW, mW,
/// W, dB, Hz, kHz, MHz, GHz, b, kb, Mb, Gb, s, ms, m); unknown sections, keys or
/// units raise ConfigError naming "section.key".
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text with every key, SI values at full precision.
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a over the canonical text of the sections that shape the environment
/// and the learners. The agent kind, training length, seeds and sweeps are
/// excluded; checkpoints record the agent kind themselves.
std::string config_hash(const ExperimentConfig& cfg);

} // namespace rris
