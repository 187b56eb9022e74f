#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "qsc/quantum.hpp"
#include "qsc/rng.hpp"

namespace qsc::env {

using quantum::BlochPoint;
using quantum::PureState;

// Actions 0, 1, 2 map onto the controls U1, U2, U3.
using ActionId = int;
inline constexpr int kNumActions = 3;

struct EnvConfig {
    BlochPoint initial{};  // defaults set in default_config()
    BlochPoint target{};
    int theta_bins = 60;
    int phi_bins = 60;
    int max_steps = 200;
    double success_fidelity = 0.99;
    bool random_start = false; // robustness experiments only

    void validate() const; // throws std::invalid_argument
    int num_states() const { return theta_bins * phi_bins; }
};

// The reference control task: initial (pi/60, pi/30), target (41pi/60, 29pi/30).
EnvConfig default_config();

struct StepOutcome {
    PureState next_state;
    int next_index = 0;
    double reward = 0.0;
    double fidelity = 0.0;
    bool done = false;
};

using ControlSequence = std::vector<ActionId>;

// Row-major (theta bin, phi bin) cell index on a uniform grid.
int discretize(const BlochPoint& p, const EnvConfig& cfg);

// The three-level step reward: 10 for f <= 0.5, 100 for 0.5 < f <= 0.7,
// 10000 for f > 0.7.
double reward_from_fidelity(double f);

// Episode-stateful wrapper around the three-switch controlled system.
class Environment {
public:
    explicit Environment(const EnvConfig& cfg);

    // Deterministic reset to the configured initial state (or a uniform
    // random Bloch point when random_start is set and an rng is supplied).
    std::pair<PureState, int> reset();
    std::pair<PureState, int> reset(Rng& rng);

    StepOutcome step(ActionId a);

    const EnvConfig& config() const { return cfg_; }
    const PureState& state() const { return state_; }
    const PureState& target_state() const { return target_; }
    int state_index() const { return index_; }
    int steps_taken() const { return steps_; }
    bool done() const { return done_; }
    const quantum::ControlSet& controls() const { return controls_; }

private:
    std::pair<PureState, int> reset_to(const BlochPoint& p);

    EnvConfig cfg_;
    quantum::ControlSet controls_;
    PureState state_;
    PureState target_;
    int index_ = 0;
    int steps_ = 0;
    bool done_ = false;
    bool initialized_ = false;
};

// J(u): fidelity with the target after applying the whole sequence to the
// initial state.
double evaluate_sequence(const ControlSequence& seq, const EnvConfig& cfg);

// "a*pi/b" style angle expressions (also plain numbers, "pi", "pi/b", "a*pi").
double parse_angle(const std::string& text);

// Key-value config text: one "key = value" per line, '#' comments.
std::map<std::string, std::string> parse_key_values(std::istream& in);

// Builds an EnvConfig from keys initial_theta, initial_phi, target_theta,
// target_phi, theta_bins, phi_bins, max_steps, success_fidelity. Unknown
// keys are rejected unless allow_extra is set (used by the harness parser).
EnvConfig env_config_from_map(const std::map<std::string, std::string>& kv,
                              bool allow_extra = false);

} // namespace qsc::env
