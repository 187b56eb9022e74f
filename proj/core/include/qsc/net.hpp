#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qsc/quantum.hpp"

namespace qsc::net {

struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

struct NetworkSpec {
    int input_dim = 3;
    std::vector<int> hidden{32, 32};
    int output_dim = 3;
    double leaky_slope = 0.01;
    bool residual = true; // skip from first hidden activation to last hidden pre-activation

    void validate() const;
    int num_layers() const { return static_cast<int>(hidden.size()) + 1; }
    bool residual_active() const { return residual && hidden.size() >= 2; }
};

// Interleaved [W0, b0, W1, b1, ...]; W has rows=fan_out, cols=fan_in,
// biases are column vectors.
struct NetworkParameters {
    NetworkSpec spec;
    std::vector<Tensor> tensors;

    Tensor& weight(int layer) { return tensors[2 * layer]; }
    const Tensor& weight(int layer) const { return tensors[2 * layer]; }
    Tensor& bias(int layer) { return tensors[2 * layer + 1]; }
    const Tensor& bias(int layer) const { return tensors[2 * layer + 1]; }
};

// One tensor per parameter tensor, shape-matched.
using Gradient = std::vector<Tensor>;
using EligibilityTrace = std::vector<Tensor>;

struct LearnerConfig {
    double beta = 0.01;  // network learning rate
    double lambda = 0.8; // trace coefficient
    double gamma = 0.9;  // discount used by the trace and TD target

    // Rewards are scaled by this factor before entering any network
    // update, keeping the regression targets O(1); the raw three-level
    // rewards (up to 10000) otherwise drive the online TD recursion into
    // numeric overflow. Value estimates are therefore in scaled units.
    double reward_scale = 1e-4;

    void validate() const;
};

using Features = std::array<double, 3>;
using Outputs = std::array<double, 3>;

// Bloch vector (sin t cos p, sin t sin p, cos t) of the state.
Features features(const quantum::PureState& s);

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases,
// deterministic in the seed.
NetworkParameters init_network(const NetworkSpec& spec, std::uint64_t seed);

// All-zero parameters of the given architecture.
NetworkParameters zero_network(const NetworkSpec& spec);

Outputs forward(const NetworkParameters& p, const Features& x);

// max_a Q(s, a); ties resolved toward the lowest action id by argmax.
double v_value(const NetworkParameters& p, const Features& x);
int output_argmax(const Outputs& y);

// Reverse-mode gradient of sum(dLdy . outputs) with respect to every
// parameter tensor. Shared by the value head, DQL regression and PG.
Gradient backward(const NetworkParameters& p, const Features& x, const Outputs& dLdy);

// Gradient of v_value: backward with a one-hot at the argmax output.
Gradient v_gradient(const NetworkParameters& p, const Features& x);

EligibilityTrace zero_trace(const NetworkParameters& p);
void trace_accumulate(EligibilityTrace& e, const Gradient& g, double gamma, double lambda);
void trace_reset(EligibilityTrace& e);

// w += beta * (r + gamma*v_next - v) * e
void td_update(NetworkParameters& p, const EligibilityTrace& e, double r,
               double v_s, double v_s_next, const LearnerConfig& cfg);

// In-place axpy over every tensor: p += scale * g.
void apply_gradient(NetworkParameters& p, const Gradient& g, double scale);

// Flat binary checkpoint: "ERLW", version byte, tensor count, then per
// tensor its dimensions and row-major 64-bit floats.
void save_checkpoint(const NetworkParameters& p, const std::string& path);
NetworkParameters load_checkpoint(const std::string& path);

} // namespace qsc::net
