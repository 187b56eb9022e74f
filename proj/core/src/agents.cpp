#include "qsc/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsc::agents {

QTable zero_table(const env::EnvConfig& cfg) { return QTable(cfg.num_states()); }

QTable random_table(const env::EnvConfig& cfg, std::uint64_t seed) {
    QTable t(cfg.num_states());
    Rng rng(seed);
    for (double& v : t.q) v = rng.uniform();
    return t;
}

void AgentConfig::validate() const {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) throw std::invalid_argument("AgentConfig: alpha in (0,1]");
    if (!(gamma > 0.0) || !(gamma <= 1.0)) throw std::invalid_argument("AgentConfig: gamma in (0,1]");
    if (epsilon0 < 0.0 || epsilon0 > 1.0) throw std::invalid_argument("AgentConfig: epsilon0 in [0,1]");
    if (episodes < 1) throw std::invalid_argument("AgentConfig: episodes must be positive");
    if (replay_capacity < 1) throw std::invalid_argument("AgentConfig: replay_capacity must be positive");
    learner.validate();
}

double AgentConfig::epsilon_for_episode(int episode) const {
    if (!anneal_epsilon || episodes <= 1) return epsilon0;
    const double t = static_cast<double>(std::min(episode, episodes) - 1) / (episodes - 1);
    return epsilon0 + t * (epsilon_final - epsilon0);
}

int argmax_row(const std::array<double, 3>& q_row) {
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (q_row[i] > q_row[best]) best = i;
    return best;
}

SelectResult select_action(const std::array<double, 3>& q_row, double epsilon0, Rng& rng) {
    const int greedy_a = argmax_row(q_row);
    const double eps = rng.uniform();
    if (eps <= 1.0 - epsilon0) return {greedy_a, true};
    const int a = rng.uniform_int(env::kNumActions);
    return {a, a == greedy_a};
}

void tabular_q_update(QTable& q, int s, ActionId a, double r, int s_next,
                      double alpha, double gamma) {
    enhanced_q_update(q, s, a, r, s_next, 0.0, alpha, gamma);
}

double shaping_term(double v_s, double v_s_next, double gamma) {
    return gamma * v_s_next - v_s;
}

void enhanced_q_update(QTable& q, int s, ActionId a, double r, int s_next,
                       double f, double alpha, double gamma) {
    const auto row = q.row(s_next);
    const double target = r + f + gamma * row[argmax_row(row)];
    q.at(s, a) += alpha * (target - q.at(s, a));
}

EpisodeLog run_episode_tql(Environment& env, QTable& q, const AgentConfig& cfg,
                           Rng& rng, int episode) {
    EpisodeLog log;
    log.episode = episode;
    const double eps = cfg.epsilon_for_episode(episode);
    auto [state, s] = env.reset(rng);
    while (!env.done()) {
        const SelectResult sel = select_action(q.row(s), eps, rng);
        const env::StepOutcome out = env.step(sel.action);
        tabular_q_update(q, s, sel.action, out.reward, out.next_index, cfg.alpha, cfg.gamma);
        s = out.next_index;
        ++log.steps;
        log.cumulative_reward += out.reward;
        log.final_fidelity = out.fidelity;
        log.best_fidelity = std::max(log.best_fidelity, out.fidelity);
    }
    log.success = log.best_fidelity >= env.config().success_fidelity;
    return log;
}

EpisodeLog run_episode_erl(Environment& env, QTable& q, net::NetworkParameters& params,
                           net::EligibilityTrace& trace, const AgentConfig& cfg,
                           Rng& rng, int episode) {
    EpisodeLog log;
    log.episode = episode;
    const double eps = cfg.epsilon_for_episode(episode);
    net::trace_reset(trace);
    auto [state, s] = env.reset(rng);
    net::Features x = net::features(state);
    while (!env.done()) {
        const SelectResult sel = select_action(q.row(s), eps, rng);
        if (sel.greedy) {
            if (!cfg.freeze_network)
                net::trace_accumulate(trace, net::v_gradient(params, x),
                                      cfg.learner.gamma, cfg.learner.lambda);
        } else {
            net::trace_reset(trace);
        }
        const env::StepOutcome out = env.step(sel.action);
        const net::Features x_next = net::features(out.next_state);
        double f = 0.0;
        if (!cfg.freeze_network) {
            const double v_s = net::v_value(params, x);
            const double v_s_next = net::v_value(params, x_next);
            net::td_update(params, trace, out.reward * cfg.learner.reward_scale,
                           v_s, v_s_next, cfg.learner);
            // The network's values are in reward_scale units; dividing the
            // potential difference back out keeps the heuristic commensurate
            // with the raw rewards in the Q update.
            f = shaping_term(v_s, v_s_next, cfg.gamma) / cfg.learner.reward_scale;
        }
        enhanced_q_update(q, s, sel.action, out.reward, out.next_index, f, cfg.alpha, cfg.gamma);
        s = out.next_index;
        x = x_next;
        ++log.steps;
        log.cumulative_reward += out.reward;
        log.final_fidelity = out.fidelity;
        log.best_fidelity = std::max(log.best_fidelity, out.fidelity);
    }
    log.success = log.best_fidelity >= env.config().success_fidelity;
    return log;
}

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    items_.reserve(capacity);
}

void ReplayBuffer::push(const TransitionRecord& t) {
    if (size() < capacity_) {
        items_.push_back(t);
    } else {
        items_[next_] = t;
        next_ = (next_ + 1) % capacity_;
    }
}

EpisodeLog run_episode_dql(Environment& env, ReplayBuffer& replay,
                           net::NetworkParameters& params, const AgentConfig& cfg,
                           Rng& rng, int episode) {
    EpisodeLog log;
    log.episode = episode;
    const double eps = cfg.epsilon_for_episode(episode);
    auto [state, s_idx] = env.reset(rng);
    net::Features x = net::features(state);
    while (!env.done()) {
        const net::Outputs qvals = net::forward(params, x);
        const SelectResult sel = select_action({qvals[0], qvals[1], qvals[2]}, eps, rng);
        const env::StepOutcome out = env.step(sel.action);
        const net::Features x_next = net::features(out.next_state);
        replay.push({x, sel.action, out.reward, x_next, out.done});

        if (replay.size() >= cfg.batch_size) {
            net::Gradient total = net::zero_trace(params);
            for (int b = 0; b < cfg.batch_size; ++b) {
                const TransitionRecord& tr = replay[rng.uniform_int(replay.size())];
                const net::Outputs pred = net::forward(params, tr.s);
                double target = tr.r * cfg.learner.reward_scale;
                if (!tr.done) {
                    const net::Outputs next = net::forward(params, tr.s_next);
                    target += cfg.gamma * next[net::output_argmax(next)];
                }
                net::Outputs dLdy{0.0, 0.0, 0.0};
                dLdy[tr.a] = pred[tr.a] - target;
                net::trace_accumulate(total, net::backward(params, tr.s, dLdy), 1.0, 1.0);
            }
            net::apply_gradient(params, total, -cfg.learner.beta / cfg.batch_size);
        }

        x = x_next;
        ++log.steps;
        log.cumulative_reward += out.reward;
        log.final_fidelity = out.fidelity;
        log.best_fidelity = std::max(log.best_fidelity, out.fidelity);
    }
    log.success = log.best_fidelity >= env.config().success_fidelity;
    return log;
}

std::array<double, 3> softmax3(const std::array<double, 3>& logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::array<double, 3> p;
    double z = 0.0;
    for (int i = 0; i < 3; ++i) {
        p[i] = std::exp(logits[i] - m);
        z += p[i];
    }
    for (double& v : p) v /= z;
    return p;
}

EpisodeLog run_episode_pg(Environment& env, net::NetworkParameters& params,
                          const AgentConfig& cfg, Rng& rng, int episode) {
    EpisodeLog log;
    log.episode = episode;
    auto [state, s_idx] = env.reset(rng);
    net::Features x = net::features(state);

    struct Step {
        net::Features x;
        std::array<double, 3> probs;
        ActionId a;
        double r;
    };
    std::vector<Step> traj;
    while (!env.done()) {
        const net::Outputs logits = net::forward(params, x);
        const std::array<double, 3> probs = softmax3({logits[0], logits[1], logits[2]});
        const double u = rng.uniform();
        ActionId a = 2;
        if (u < probs[0]) a = 0;
        else if (u < probs[0] + probs[1]) a = 1;
        const env::StepOutcome out = env.step(a);
        traj.push_back({x, probs, a, out.reward});
        x = net::features(out.next_state);
        ++log.steps;
        log.cumulative_reward += out.reward;
        log.final_fidelity = out.fidelity;
        log.best_fidelity = std::max(log.best_fidelity, out.fidelity);
    }
    log.success = log.best_fidelity >= env.config().success_fidelity;

    // REINFORCE with the episode-mean return as baseline.
    std::vector<double> returns(traj.size());
    double g = 0.0;
    for (int t = static_cast<int>(traj.size()) - 1; t >= 0; --t) {
        g = traj[t].r * cfg.learner.reward_scale + cfg.gamma * g;
        returns[t] = g;
    }
    double baseline = 0.0;
    for (double v : returns) baseline += v;
    baseline /= static_cast<double>(returns.size());

    net::Gradient total = net::zero_trace(params);
    for (std::size_t t = 0; t < traj.size(); ++t) {
        const double adv = returns[t] - baseline;
        if (adv == 0.0) continue;
        net::Outputs dLdy;
        for (int i = 0; i < 3; ++i)
            dLdy[i] = adv * ((i == traj[t].a ? 1.0 : 0.0) - traj[t].probs[i]);
        net::trace_accumulate(total, net::backward(params, traj[t].x, dLdy), 1.0, 1.0);
    }
    net::apply_gradient(params, total, cfg.learner.beta);
    return log;
}

std::pair<ControlSequence, double> brute_force_optimal(const env::EnvConfig& cfg,
                                                       int horizon, int beam) {
    cfg.validate();
    if (horizon < 0) throw std::invalid_argument("brute_force_optimal: negative horizon");
    if (beam < 1) throw std::invalid_argument("brute_force_optimal: beam must be >= 1");

    const auto controls = quantum::build_control_set();
    const quantum::PureState target = quantum::bloch_to_state(cfg.target);

    struct Node {
        quantum::PureState s;
        int parent;      // index into the arena, -1 at the root
        ActionId action; // edge taken from the parent
        double fid;
    };
    std::vector<Node> arena;
    arena.push_back({quantum::bloch_to_state(cfg.initial), -1, 0,
                     quantum::fidelity_pure(quantum::bloch_to_state(cfg.initial), target)});

    int best_node = 0;
    double best_fid = arena[0].fid;

    std::vector<int> frontier{0};
    for (int depth = 1; depth <= horizon; ++depth) {
        std::vector<int> next;
        next.reserve(frontier.size() * 3);
        for (int idx : frontier) {
            for (ActionId a = 0; a < env::kNumActions; ++a) {
                Node child;
                child.s = quantum::apply(controls[a], arena[idx].s);
                child.parent = idx;
                child.action = a;
                child.fid = quantum::fidelity_pure(child.s, target);
                arena.push_back(child);
                next.push_back(static_cast<int>(arena.size()) - 1);
                if (child.fid > best_fid) {
                    best_fid = child.fid;
                    best_node = static_cast<int>(arena.size()) - 1;
                }
            }
        }
        if (depth > 8 && static_cast<int>(next.size()) > beam) {
            std::stable_sort(next.begin(), next.end(), [&](int a, int b) {
                return arena[a].fid > arena[b].fid;
            });
            next.resize(beam);
        }
        frontier = std::move(next);
    }

    ControlSequence seq;
    for (int n = best_node; arena[n].parent != -1; n = arena[n].parent)
        seq.push_back(arena[n].action);
    std::reverse(seq.begin(), seq.end());
    return {seq, best_fid};
}

double greedy_rollout(const env::EnvConfig& cfg, const QTable& q) {
    Environment env(cfg);
    auto [state, s] = env.reset();
    double best = quantum::fidelity_pure(state, env.target_state());
    while (!env.done()) {
        const env::StepOutcome out = env.step(argmax_row(q.row(s)));
        s = out.next_index;
        best = std::max(best, out.fidelity);
    }
    return best;
}

} // namespace qsc::agents
