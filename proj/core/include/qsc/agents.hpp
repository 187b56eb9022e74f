#pragma once

#include <utility>
#include <vector>

#include "qsc/env.hpp"
#include "qsc/net.hpp"
#include "qsc/rng.hpp"

namespace qsc::agents {

using env::ActionId;
using env::ControlSequence;
using env::Environment;

// Dense (state, action) value table.
struct QTable {
    int n_states = 0;
    std::vector<double> q; // n_states x kNumActions, row major

    QTable() = default;
    explicit QTable(int states) : n_states(states), q(static_cast<std::size_t>(states) * env::kNumActions, 0.0) {}

    double& at(int s, int a) { return q[static_cast<std::size_t>(s) * env::kNumActions + a]; }
    double at(int s, int a) const { return q[static_cast<std::size_t>(s) * env::kNumActions + a]; }
    std::array<double, 3> row(int s) const { return {at(s, 0), at(s, 1), at(s, 2)}; }
};

QTable zero_table(const env::EnvConfig& cfg);
QTable random_table(const env::EnvConfig& cfg, std::uint64_t seed); // entries uniform in [0, 1)

struct AgentConfig {
    double alpha = 0.1;    // table learning rate
    double gamma = 0.99;   // table discount
    double epsilon0 = 0.15; // exploration probability; see select_action
    net::LearnerConfig learner{};
    int episodes = 500;
    int replay_capacity = 2000; // DQL only
    int batch_size = 32;        // DQL only
    bool random_q_init = false;
    bool freeze_network = false; // ERL debugging/reduction runs
    bool anneal_epsilon = false; // optional linear anneal to epsilon_final
    double epsilon_final = 0.01;

    void validate() const;

    // Exploration rate for a given 1-based episode under the optional anneal.
    double epsilon_for_episode(int episode) const;
};

struct EpisodeLog {
    int episode = 0;
    int steps = 0;
    double final_fidelity = 0.0;
    double best_fidelity = 0.0;
    double cumulative_reward = 0.0;
    bool success = false;
};

struct SelectResult {
    ActionId action = 0;
    bool greedy = false;
};

// Draws eps in [0,1); takes the argmax when eps <= 1 - epsilon0 (ties to the
// lowest action id), otherwise a uniform random action. A random draw that
// coincides with the argmax still counts as greedy.
SelectResult select_action(const std::array<double, 3>& q_row, double epsilon0, Rng& rng);

int argmax_row(const std::array<double, 3>& q_row);

void tabular_q_update(QTable& q, int s, ActionId a, double r, int s_next,
                      double alpha, double gamma);

// Potential-difference heuristic gamma*V(s') - V(s).
double shaping_term(double v_s, double v_s_next, double gamma);

// Q(s,a) += alpha * (r + f + gamma * max Q(s',.) - Q(s,a))
void enhanced_q_update(QTable& q, int s, ActionId a, double r, int s_next,
                       double f, double alpha, double gamma);

EpisodeLog run_episode_tql(Environment& env, QTable& q, const AgentConfig& cfg,
                           Rng& rng, int episode = 1);

EpisodeLog run_episode_erl(Environment& env, QTable& q, net::NetworkParameters& params,
                           net::EligibilityTrace& trace, const AgentConfig& cfg,
                           Rng& rng, int episode = 1);

struct TransitionRecord {
    net::Features s{};
    ActionId a = 0;
    double r = 0.0;
    net::Features s_next{};
    bool done = false;
};

// Fixed-capacity ring buffer, oldest transition evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(int capacity);

    void push(const TransitionRecord& t);
    int size() const { return static_cast<int>(items_.size()); }
    int capacity() const { return capacity_; }
    const TransitionRecord& operator[](int i) const { return items_[i]; }

private:
    int capacity_;
    std::size_t next_ = 0;
    std::vector<TransitionRecord> items_;
};

EpisodeLog run_episode_dql(Environment& env, ReplayBuffer& replay,
                           net::NetworkParameters& params, const AgentConfig& cfg,
                           Rng& rng, int episode = 1);

EpisodeLog run_episode_pg(Environment& env, net::NetworkParameters& params,
                          const AgentConfig& cfg, Rng& rng, int episode = 1);

std::array<double, 3> softmax3(const std::array<double, 3>& logits);

// Planning oracle: exhaustive enumeration up to depth 8, beam search beyond.
// Returns the best sequence over all depths <= horizon and its J(u); the
// returned J is non-decreasing in horizon.
std::pair<ControlSequence, double> brute_force_optimal(const env::EnvConfig& cfg,
                                                       int horizon, int beam);

// Greedy rollout of a trained table from the configured initial state;
// returns the best fidelity reached within max_steps.
double greedy_rollout(const env::EnvConfig& cfg, const QTable& q);

} // namespace qsc::agents
