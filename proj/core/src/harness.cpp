#include "qsc/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qsc::harness {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

const std::vector<std::string> kKinds = {"tql", "erl", "dql", "pg"};

} // namespace

void ExperimentConfig::validate() const {
    env.validate();
    agent.validate();
    if (seeds.empty()) throw std::invalid_argument("ExperimentConfig: need at least one seed");
    if (max_episodes < 1) throw std::invalid_argument("ExperimentConfig: max_episodes must be >= 1");
    if (std::find(kKinds.begin(), kKinds.end(), agent_kind) == kKinds.end())
        throw std::invalid_argument("ExperimentConfig: unknown agent kind '" + agent_kind + "'");
}

RunResult run_single(const std::string& agent_kind, const env::EnvConfig& env_cfg,
                     const agents::AgentConfig& agent_cfg, std::uint64_t seed,
                     int max_episodes) {
    RunResult res;
    res.agent_kind = agent_kind;
    res.seed = seed;
    res.logs.reserve(max_episodes);

    Rng rng(seed);
    env::Environment environment(env_cfg);

    agents::AgentConfig cfg = agent_cfg;
    cfg.episodes = max_episodes;

    if (agent_kind == "tql" || agent_kind == "erl") {
        res.table = cfg.random_q_init ? agents::random_table(env_cfg, seed)
                                      : agents::zero_table(env_cfg);
    }
    if (agent_kind != "tql")
        res.params = net::init_network(net::NetworkSpec{}, seed);
    if (agent_kind == "erl" && cfg.freeze_network)
        res.params = net::zero_network(net::NetworkSpec{});

    net::EligibilityTrace trace;
    if (agent_kind == "erl") trace = net::zero_trace(res.params);
    std::optional<agents::ReplayBuffer> replay;
    if (agent_kind == "dql") replay.emplace(cfg.replay_capacity);

    for (int ep = 1; ep <= max_episodes; ++ep) {
        agents::EpisodeLog log;
        if (agent_kind == "tql")
            log = agents::run_episode_tql(environment, res.table, cfg, rng, ep);
        else if (agent_kind == "erl")
            log = agents::run_episode_erl(environment, res.table, res.params, trace, cfg, rng, ep);
        else if (agent_kind == "dql")
            log = agents::run_episode_dql(environment, *replay, res.params, cfg, rng, ep);
        else
            log = agents::run_episode_pg(environment, res.params, cfg, rng, ep);
        res.logs.push_back(log);
        res.best_fidelity = std::max(res.best_fidelity, log.best_fidelity);
        if (!res.episodes_to_success && log.best_fidelity >= env_cfg.success_fidelity)
            res.episodes_to_success = ep;
    }
    return res;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!cfg.output_dir.empty()) {
        std::error_code ec;
        fs::create_directories(cfg.output_dir, ec);
        const fs::path probe = fs::path(cfg.output_dir) / ".write_probe";
        std::ofstream f(probe);
        if (!f) throw std::runtime_error("output directory not writable: " + cfg.output_dir);
        f.close();
        fs::remove(probe, ec);
    }

    std::vector<std::future<RunResult>> futures;
    futures.reserve(cfg.seeds.size());
    for (std::uint64_t seed : cfg.seeds)
        futures.push_back(std::async(std::launch::async, [&cfg, seed] {
            return run_single(cfg.agent_kind, cfg.env, cfg.agent, seed, cfg.max_episodes);
        }));

    std::vector<RunResult> results;
    results.reserve(futures.size());
    for (auto& f : futures) results.push_back(f.get());
    return results;
}

std::vector<SummaryRow> summarize(const std::vector<RunResult>& results, int max_episodes) {
    if (results.empty()) throw std::invalid_argument("summarize: empty results");
    std::vector<SummaryRow> rows;
    for (const std::string& kind : kKinds) {
        SummaryRow row;
        row.agent_kind = kind;
        int n = 0;
        for (const RunResult& r : results) {
            if (r.agent_kind != kind) continue;
            ++n;
            row.mean_episodes_to_success += r.episodes_to_success.value_or(max_episodes);
            row.success_rate += r.episodes_to_success ? 1.0 : 0.0;
            row.mean_best_fidelity += r.best_fidelity;
        }
        if (n == 0) continue;
        row.mean_episodes_to_success /= n;
        row.success_rate /= n;
        row.mean_best_fidelity /= n;
        rows.push_back(row);
    }
    return rows;
}

void emit_csv(const std::vector<RunResult>& results, const std::string& path) {
    std::ostringstream out;
    out << "agent,seed,episode,steps,final_fidelity,best_fidelity,cumulative_reward,success\n";
    for (const RunResult& r : results) {
        for (const agents::EpisodeLog& log : r.logs) {
            out << r.agent_kind << ',' << r.seed << ',' << log.episode << ',' << log.steps
                << ',' << fmt("%.6f", log.final_fidelity) << ',' << fmt("%.6f", log.best_fidelity)
                << ',' << fmt("%.1f", log.cumulative_reward) << ',' << (log.success ? 1 : 0)
                << '\n';
        }
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
    f << out.str();
    if (!f) throw std::runtime_error("emit_csv: write failed for " + path);
}

void emit_svg(const std::vector<RunResult>& results, const std::string& path) {
    // Mean best_fidelity per episode for each agent kind present.
    struct Series {
        std::string kind;
        std::vector<double> mean;
    };
    std::vector<Series> series;
    for (const std::string& kind : kKinds) {
        std::vector<double> sum;
        int n = 0;
        for (const RunResult& r : results) {
            if (r.agent_kind != kind) continue;
            ++n;
            if (sum.size() < r.logs.size()) sum.resize(r.logs.size(), 0.0);
            for (std::size_t i = 0; i < r.logs.size(); ++i) sum[i] += r.logs[i].best_fidelity;
        }
        if (n == 0) continue;
        for (double& v : sum) v /= n;
        series.push_back({kind, std::move(sum)});
    }

    const double width = 800, height = 500;
    const double ml = 60, mr = 20, mt = 40, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;
    std::size_t max_ep = 1;
    for (const Series& s : series) max_ep = std::max(max_ep, s.mean.size());

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << "Best fidelity per episode (mean over seeds)</text>\n";
    // Axes
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
        << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\" font-size=\"12\">Episode</text>\n";
    out << "<text x=\"15\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 "
        << mt + ph / 2 << ")\">Fidelity</text>\n";
    for (int k = 0; k <= 5; ++k) {
        const double fy = mt + ph - ph * k / 5.0;
        out << "<text x=\"" << ml - 8 << "\" y=\"" << fmt("%.1f", fy + 4)
            << "\" text-anchor=\"end\" font-size=\"10\">" << fmt("%.1f", k / 5.0) << "</text>\n";
    }

    const std::map<std::string, std::string> colors = {
        {"tql", "#d62728"}, {"erl", "#1f77b4"}, {"dql", "#2ca02c"}, {"pg", "#9467bd"}};
    double legend_y = mt + 10;
    for (const Series& s : series) {
        const std::string& color = colors.at(s.kind);
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.mean.size(); ++i) {
            const double x = ml + (max_ep > 1 ? pw * i / (max_ep - 1) : 0.0);
            const double y = mt + ph - ph * std::min(1.0, std::max(0.0, s.mean[i]));
            out << fmt("%.2f", x) << ',' << fmt("%.2f", y);
            if (i + 1 < s.mean.size()) out << ' ';
        }
        out << "\"/>\n";
        out << "<rect x=\"" << ml + pw - 90 << "\" y=\"" << legend_y - 9
            << "\" width=\"12\" height=\"3\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << ml + pw - 72 << "\" y=\"" << legend_y
            << "\" font-size=\"11\">" << s.kind << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_svg: cannot open " + path);
    f << out.str();
    if (!f) throw std::runtime_error("emit_svg: write failed for " + path);
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "agent  mean_episodes_to_success  success_rate  mean_best_fidelity\n";
    for (const SummaryRow& r : rows) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%-5s  %24.2f  %12.2f  %18.4f\n",
                      r.agent_kind.c_str(), r.mean_episodes_to_success, r.success_rate,
                      r.mean_best_fidelity);
        out << buf;
    }
    return out.str();
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    const auto kv = env::parse_key_values(in);

    ExperimentConfig cfg;
    std::map<std::string, std::string> env_kv;
    for (const auto& [key, value] : kv) {
        if (key.rfind("env.", 0) == 0) {
            env_kv[key.substr(4)] = value;
        } else if (key.rfind("agent.", 0) == 0) {
            const std::string k = key.substr(6);
            if (k == "alpha") cfg.agent.alpha = std::stod(value);
            else if (k == "gamma") cfg.agent.gamma = std::stod(value);
            else if (k == "epsilon0") cfg.agent.epsilon0 = std::stod(value);
            else if (k == "beta") cfg.agent.learner.beta = std::stod(value);
            else if (k == "lambda") cfg.agent.learner.lambda = std::stod(value);
            else if (k == "net_gamma") cfg.agent.learner.gamma = std::stod(value);
            else if (k == "reward_scale") cfg.agent.learner.reward_scale = std::stod(value);
            else if (k == "replay_capacity") cfg.agent.replay_capacity = std::stoi(value);
            else if (k == "random_q_init") cfg.agent.random_q_init = (value == "1" || value == "true");
            else if (k == "freeze_network") cfg.agent.freeze_network = (value == "1" || value == "true");
            else if (k == "anneal_epsilon") cfg.agent.anneal_epsilon = (value == "1" || value == "true");
            else if (k == "epsilon_final") cfg.agent.epsilon_final = std::stod(value);
            else throw std::invalid_argument("unknown agent config key: " + key);
        } else if (key.rfind("run.", 0) == 0) {
            const std::string k = key.substr(4);
            if (k == "agent") cfg.agent_kind = value;
            else if (k == "episodes") cfg.max_episodes = std::stoi(value);
            else if (k == "out") cfg.output_dir = value;
            else if (k == "seed_count") {
                const int n = std::stoi(value);
                cfg.seeds.clear();
                for (int i = 1; i <= n; ++i) cfg.seeds.push_back(i);
            } else if (k == "seeds") {
                cfg.seeds.clear();
                std::stringstream ss(value);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    if (!tok.empty()) cfg.seeds.push_back(std::stoull(tok));
            } else {
                throw std::invalid_argument("unknown run config key: " + key);
            }
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    cfg.env = env::env_config_from_map(env_kv);
    if (cfg.seeds.empty())
        for (int i = 1; i <= 20; ++i) cfg.seeds.push_back(i);
    cfg.validate();
    return cfg;
}

} // namespace qsc::harness
