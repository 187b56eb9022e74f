#include "qsc/env.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qsc::env {

namespace {
constexpr double kPi = std::numbers::pi;
}

void EnvConfig::validate() const {
    if (theta_bins < 2 || phi_bins < 2)
        throw std::invalid_argument("EnvConfig: bins must be >= 2");
    if (max_steps < 1)
        throw std::invalid_argument("EnvConfig: max_steps must be positive");
    if (!(success_fidelity > 0.7) || !(success_fidelity <= 1.0))
        throw std::invalid_argument("EnvConfig: success_fidelity must be in (0.7, 1]");
    if (initial.theta < 0.0 || initial.theta > kPi || target.theta < 0.0 || target.theta > kPi)
        throw std::invalid_argument("EnvConfig: theta out of [0, pi]");
}

EnvConfig default_config() {
    EnvConfig cfg;
    cfg.initial = {kPi / 60.0, kPi / 30.0};
    cfg.target = {41.0 * kPi / 60.0, 29.0 * kPi / 30.0};
    return cfg;
}

int discretize(const BlochPoint& p, const EnvConfig& cfg) {
    int t = static_cast<int>(std::floor(p.theta / kPi * cfg.theta_bins));
    t = std::min(std::max(t, 0), cfg.theta_bins - 1);
    long long f = static_cast<long long>(std::floor(p.phi / (2.0 * kPi) * cfg.phi_bins));
    int ph = static_cast<int>(((f % cfg.phi_bins) + cfg.phi_bins) % cfg.phi_bins);
    return t * cfg.phi_bins + ph;
}

double reward_from_fidelity(double f) {
    if (!(f >= 0.0) || !(f <= 1.0))
        throw std::invalid_argument("reward_from_fidelity: fidelity outside [0, 1]");
    if (f <= 0.5) return 10.0;
    if (f <= 0.7) return 100.0;
    return 10000.0;
}

Environment::Environment(const EnvConfig& cfg)
    : cfg_(cfg), controls_(quantum::build_control_set()) {
    cfg_.validate();
    target_ = quantum::bloch_to_state(cfg_.target);
}

std::pair<PureState, int> Environment::reset_to(const BlochPoint& p) {
    state_ = quantum::bloch_to_state(p);
    index_ = discretize(p, cfg_);
    steps_ = 0;
    done_ = false;
    initialized_ = true;
    return {state_, index_};
}

std::pair<PureState, int> Environment::reset() { return reset_to(cfg_.initial); }

std::pair<PureState, int> Environment::reset(Rng& rng) {
    if (!cfg_.random_start) return reset();
    // Uniform over the sphere: cos(theta) uniform in [-1, 1].
    BlochPoint p;
    p.theta = std::acos(1.0 - 2.0 * rng.uniform());
    p.phi = rng.uniform(0.0, 2.0 * kPi);
    return reset_to(p);
}

StepOutcome Environment::step(ActionId a) {
    if (!initialized_) throw std::logic_error("Environment::step before reset");
    if (done_) throw std::logic_error("Environment::step after episode end");
    if (a < 0 || a >= kNumActions) throw std::invalid_argument("Environment::step: bad action");

    state_ = quantum::apply(controls_[a], state_);
    ++steps_;

    StepOutcome out;
    out.next_state = state_;
    out.fidelity = quantum::fidelity_pure(state_, target_);
    out.reward = reward_from_fidelity(out.fidelity);
    out.next_index = index_ = discretize(quantum::state_to_bloch(state_), cfg_);
    out.done = done_ = (out.fidelity >= cfg_.success_fidelity) || (steps_ >= cfg_.max_steps);
    return out;
}

double evaluate_sequence(const ControlSequence& seq, const EnvConfig& cfg) {
    cfg.validate();
    const auto controls = quantum::build_control_set();
    PureState s = quantum::bloch_to_state(cfg.initial);
    const PureState target = quantum::bloch_to_state(cfg.target);
    for (ActionId a : seq) {
        if (a < 0 || a >= kNumActions) throw std::invalid_argument("evaluate_sequence: bad action");
        s = quantum::apply(controls[a], s);
    }
    return quantum::fidelity_pure(s, target);
}

double parse_angle(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("parse_angle: empty value");

    double sign = 1.0;
    std::size_t pos = 0;
    if (s[pos] == '-') { sign = -1.0; ++pos; }
    else if (s[pos] == '+') { ++pos; }
    s = s.substr(pos);

    const auto to_num = [](const std::string& t) {
        std::size_t used = 0;
        double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument("parse_angle: bad number '" + t + "'");
        return v;
    };

    double a = 1.0, b = 1.0;
    bool has_pi = false;
    const std::size_t star = s.find('*');
    const std::size_t slash = s.find('/');
    std::string core = s;
    if (slash != std::string::npos) {
        b = to_num(s.substr(slash + 1));
        core = s.substr(0, slash);
    }
    if (star != std::string::npos) {
        a = to_num(core.substr(0, core.find('*')));
        core = core.substr(core.find('*') + 1);
    }
    if (core == "pi" || core == "PI" || core == "Pi") {
        has_pi = true;
    } else if (star != std::string::npos || slash != std::string::npos) {
        a *= to_num(core);
    } else {
        return sign * to_num(core);
    }
    return sign * a * (has_pi ? kPi : 1.0) / b;
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto trim = [](std::string t) {
            const auto b = t.find_first_not_of(" \t\r");
            const auto e = t.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key or value");
        kv[key] = value;
    }
    return kv;
}

EnvConfig env_config_from_map(const std::map<std::string, std::string>& kv, bool allow_extra) {
    EnvConfig cfg = default_config();
    for (const auto& [key, value] : kv) {
        if (key == "initial_theta") cfg.initial.theta = parse_angle(value);
        else if (key == "initial_phi") cfg.initial.phi = parse_angle(value);
        else if (key == "target_theta") cfg.target.theta = parse_angle(value);
        else if (key == "target_phi") cfg.target.phi = parse_angle(value);
        else if (key == "theta_bins") cfg.theta_bins = std::stoi(value);
        else if (key == "phi_bins") cfg.phi_bins = std::stoi(value);
        else if (key == "max_steps") cfg.max_steps = std::stoi(value);
        else if (key == "success_fidelity") cfg.success_fidelity = std::stod(value);
        else if (key == "random_start") cfg.random_start = (value == "1" || value == "true");
        else if (!allow_extra) throw std::invalid_argument("unknown env config key: " + key);
    }
    cfg.validate();
    return cfg;
}

} // namespace qsc::env
