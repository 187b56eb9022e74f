// Command line front end for the spin-1/2 control RL toolkit.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "qsc/harness.hpp"

namespace {

namespace fs = std::filesystem;
using qsc::harness::ExperimentConfig;
using qsc::harness::RunResult;

std::vector<std::uint64_t> seed_range(int n) {
    std::vector<std::uint64_t> seeds;
    for (int i = 1; i <= n; ++i) seeds.push_back(i);
    return seeds;
}

int cmd_train(const std::string& config_path, int seeds, const std::string& agent,
              int episodes, const std::string& out_dir) {
    ExperimentConfig cfg = qsc::harness::load_experiment_config(config_path);
    if (seeds > 0) cfg.seeds = seed_range(seeds);
    if (!agent.empty()) cfg.agent_kind = agent;
    if (episodes > 0) cfg.max_episodes = episodes;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    cfg.validate();

    const std::vector<RunResult> results = qsc::harness::run_experiment(cfg);
    const fs::path dir(cfg.output_dir);
    qsc::harness::emit_csv(results, (dir / (cfg.agent_kind + ".csv")).string());
    qsc::harness::emit_svg(results, (dir / (cfg.agent_kind + ".svg")).string());
    if (cfg.agent_kind != "tql")
        qsc::net::save_checkpoint(results.front().params,
                                  (dir / (cfg.agent_kind + "_seed" +
                                          std::to_string(results.front().seed) + ".erlw"))
                                      .string());
    const auto summary = qsc::harness::summarize(results, cfg.max_episodes);
    std::cout << qsc::harness::format_summary(summary);
    return 0;
}

int cmd_compare(const std::string& config_path, int seeds, int episodes,
                const std::string& out_dir) {
    ExperimentConfig base;
    if (!config_path.empty()) base = qsc::harness::load_experiment_config(config_path);
    if (seeds > 0) base.seeds = seed_range(seeds);
    if (base.seeds.empty()) base.seeds = seed_range(20);
    if (episodes > 0) base.max_episodes = episodes;
    if (!out_dir.empty()) base.output_dir = out_dir;

    std::vector<RunResult> all;
    for (const std::string kind : {"tql", "erl", "dql", "pg"}) {
        ExperimentConfig cfg = base;
        cfg.agent_kind = kind;
        cfg.validate();
        std::vector<RunResult> results = qsc::harness::run_experiment(cfg);
        for (RunResult& r : results) all.push_back(std::move(r));
    }
    const fs::path dir(base.output_dir);
    qsc::harness::emit_csv(all, (dir / "compare.csv").string());
    qsc::harness::emit_svg(all, (dir / "compare.svg").string());
    std::cout << qsc::harness::format_summary(qsc::harness::summarize(all, base.max_episodes));
    return 0;
}

int cmd_oracle(const std::string& config_path, int horizon, int beam) {
    qsc::env::EnvConfig env_cfg = qsc::env::default_config();
    if (!config_path.empty())
        env_cfg = qsc::harness::load_experiment_config(config_path).env;
    const auto [seq, j] = qsc::agents::brute_force_optimal(env_cfg, horizon, beam);
    std::cout << "J = ";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", j);
    std::cout << buf << "\nsequence (" << seq.size() << " steps):";
    for (int a : seq) std::cout << " U" << (a + 1);
    std::cout << "\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& config_path) {
    qsc::env::EnvConfig env_cfg = qsc::env::default_config();
    if (!config_path.empty())
        env_cfg = qsc::harness::load_experiment_config(config_path).env;
    const qsc::net::NetworkParameters params = qsc::net::load_checkpoint(checkpoint);

    qsc::env::Environment env(env_cfg);
    auto [state, idx] = env.reset();
    double best = qsc::quantum::fidelity_pure(state, env.target_state());
    double final = best;
    while (!env.done()) {
        const auto y = qsc::net::forward(params, qsc::net::features(env.state()));
        const auto out = env.step(qsc::net::output_argmax(y));
        final = out.fidelity;
        best = std::max(best, out.fidelity);
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "final_fidelity = %.6f\nbest_fidelity = %.6f\n", final, best);
    std::cout << buf;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-1/2 quantum control via reinforcement learning"};
    app.require_subcommand(1);

    std::string config_path, agent, out_dir, checkpoint;
    int seeds = 0, episodes = 0, horizon = 30, beam = 1024;

    auto* train = app.add_subcommand("train", "Train one agent from a config file");
    train->add_option("--config", config_path, "experiment config file")->required();
    train->add_option("--seeds", seeds, "number of seeds (1..N)");
    train->add_option("--agent", agent, "agent kind: tql|erl|dql|pg");
    train->add_option("--episodes", episodes, "episodes per run");
    train->add_option("--out", out_dir, "output directory");

    auto* compare = app.add_subcommand("compare", "Run all four agents with shared seeds");
    compare->add_option("--config", config_path, "experiment config file");
    compare->add_option("--seeds", seeds, "number of seeds (1..N)");
    compare->add_option("--episodes", episodes, "episodes per run");
    compare->add_option("--out", out_dir, "output directory");

    auto* oracle = app.add_subcommand("oracle", "Brute-force/beam planning oracle");
    oracle->add_option("--config", config_path, "experiment config file");
    oracle->add_option("--horizon", horizon, "search depth");
    oracle->add_option("--beam", beam, "beam width beyond depth 8");

    auto* eval = app.add_subcommand("eval", "Greedy rollout of a saved network checkpoint");
    eval->add_option("--checkpoint", checkpoint, "ERLW checkpoint path")->required();
    eval->add_option("--config", config_path, "experiment config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (train->parsed()) return cmd_train(config_path, seeds, agent, episodes, out_dir);
        if (compare->parsed()) return cmd_compare(config_path, seeds, episodes, out_dir);
        if (oracle->parsed()) return cmd_oracle(config_path, horizon, beam);
        if (eval->parsed()) return cmd_eval(checkpoint, config_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
