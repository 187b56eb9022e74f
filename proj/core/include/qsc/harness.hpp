#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsc/agents.hpp"

namespace qsc::harness {

struct ExperimentConfig {
    env::EnvConfig env = env::default_config();
    std::string agent_kind = "erl"; // tql | erl | dql | pg
    agents::AgentConfig agent{};
    std::vector<std::uint64_t> seeds;
    int max_episodes = 500;
    std::string output_dir = "out";

    void validate() const;
};

struct RunResult {
    std::string agent_kind;
    std::uint64_t seed = 0;
    std::vector<agents::EpisodeLog> logs;
    std::optional<int> episodes_to_success; // 1-based episode index
    double best_fidelity = 0.0;
    agents::QTable table;          // tql/erl only
    net::NetworkParameters params; // erl/dql/pg only
};

struct SummaryRow {
    std::string agent_kind;
    double mean_episodes_to_success = 0.0; // censored at max_episodes
    double success_rate = 0.0;
    double mean_best_fidelity = 0.0;
};

// One full training run, deterministic in (kind, configs, seed).
RunResult run_single(const std::string& agent_kind, const env::EnvConfig& env_cfg,
                     const agents::AgentConfig& agent_cfg, std::uint64_t seed,
                     int max_episodes);

// Fans the configured seeds out across threads; results are returned in
// seed order and the output directory is validated up front.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg);

std::vector<SummaryRow> summarize(const std::vector<RunResult>& results, int max_episodes);

void emit_csv(const std::vector<RunResult>& results, const std::string& path);
void emit_svg(const std::vector<RunResult>& results, const std::string& path);

std::string format_summary(const std::vector<SummaryRow>& rows);

// Reads a sectioned key-value config file (env.*, agent.*, run.*).
ExperimentConfig load_experiment_config(const std::string& path);

} // namespace qsc::harness
