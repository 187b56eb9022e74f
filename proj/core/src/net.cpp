#include "qsc/net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "qsc/rng.hpp"

namespace qsc::net {

namespace {

struct ForwardCache {
    std::vector<std::vector<double>> act; // act[0] = input, act[l+1] = activation of layer l
    std::vector<std::vector<double>> pre; // pre[l] = z of layer l
};

std::vector<double> affine(const Tensor& w, const Tensor& b, const std::vector<double>& x) {
    std::vector<double> z(w.rows);
    for (int r = 0; r < w.rows; ++r) {
        double acc = b.v[r];
        const double* row = &w.v[static_cast<std::size_t>(r) * w.cols];
        for (int c = 0; c < w.cols; ++c) acc += row[c] * x[c];
        z[r] = acc;
    }
    return z;
}

ForwardCache run_forward(const NetworkParameters& p, const Features& x) {
    const int layers = p.spec.num_layers();
    ForwardCache fc;
    fc.act.resize(layers + 1);
    fc.pre.resize(layers);
    fc.act[0] = {x[0], x[1], x[2]};
    const double slope = p.spec.leaky_slope;
    for (int l = 0; l < layers; ++l) {
        std::vector<double> z = affine(p.weight(l), p.bias(l), fc.act[l]);
        if (p.spec.residual_active() && l == layers - 2)
            for (std::size_t i = 0; i < z.size(); ++i) z[i] += fc.act[1][i];
        fc.pre[l] = z;
        if (l < layers - 1) {
            std::vector<double> a(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) a[i] = z[i] >= 0.0 ? z[i] : slope * z[i];
            fc.act[l + 1] = std::move(a);
        } else {
            fc.act[l + 1] = std::move(z);
        }
    }
    return fc;
}

void check_shapes(const std::vector<Tensor>& a, const std::vector<Tensor>& b, const char* what) {
    if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": tensor count mismatch");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].rows != b[i].rows || a[i].cols != b[i].cols)
            throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

} // namespace

void NetworkSpec::validate() const {
    if (input_dim < 1 || output_dim < 1)
        throw std::invalid_argument("NetworkSpec: dims must be positive");
    for (int w : hidden)
        if (w < 1) throw std::invalid_argument("NetworkSpec: hidden widths must be positive");
    if (residual && hidden.size() >= 2 && hidden.front() != hidden.back())
        throw std::invalid_argument("NetworkSpec: residual skip needs equal endpoint widths");
}

void LearnerConfig::validate() const {
    if (!(beta > 0.0) || !(beta < 1.0)) throw std::invalid_argument("LearnerConfig: beta in (0,1)");
    if (!(lambda > 0.0) || !(lambda < 1.0)) throw std::invalid_argument("LearnerConfig: lambda in (0,1)");
    if (!(gamma > 0.0) || !(gamma <= 1.0)) throw std::invalid_argument("LearnerConfig: gamma in (0,1]");
    if (!(reward_scale > 0.0)) throw std::invalid_argument("LearnerConfig: reward_scale must be positive");
}

Features features(const quantum::PureState& s) {
    const quantum::BlochPoint p = quantum::state_to_bloch(s);
    return {std::sin(p.theta) * std::cos(p.phi),
            std::sin(p.theta) * std::sin(p.phi),
            std::cos(p.theta)};
}

NetworkParameters zero_network(const NetworkSpec& spec) {
    spec.validate();
    NetworkParameters p;
    p.spec = spec;
    int in = spec.input_dim;
    std::vector<int> outs = spec.hidden;
    outs.push_back(spec.output_dim);
    for (int out : outs) {
        p.tensors.emplace_back(out, in);
        p.tensors.emplace_back(out, 1);
        in = out;
    }
    return p;
}

NetworkParameters init_network(const NetworkSpec& spec, std::uint64_t seed) {
    NetworkParameters p = zero_network(spec);
    Rng rng(seed);
    for (int l = 0; l < spec.num_layers(); ++l) {
        Tensor& w = p.weight(l);
        const double scale = 1.0 / std::sqrt(static_cast<double>(w.cols));
        for (double& x : w.v) x = (2.0 * rng.uniform() - 1.0) * scale;
    }
    return p;
}

Outputs forward(const NetworkParameters& p, const Features& x) {
    const ForwardCache fc = run_forward(p, x);
    const std::vector<double>& y = fc.act.back();
    return {y[0], y[1], y[2]};
}

int output_argmax(const Outputs& y) {
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (y[i] > y[best]) best = i;
    return best;
}

double v_value(const NetworkParameters& p, const Features& x) {
    const Outputs y = forward(p, x);
    return y[output_argmax(y)];
}

Gradient backward(const NetworkParameters& p, const Features& x, const Outputs& dLdy) {
    const int layers = p.spec.num_layers();
    const ForwardCache fc = run_forward(p, x);
    const double slope = p.spec.leaky_slope;

    Gradient g;
    g.reserve(p.tensors.size());
    for (const Tensor& t : p.tensors) g.emplace_back(t.rows, t.cols);

    std::vector<std::vector<double>> dact(layers + 1);
    for (int l = 0; l <= layers; ++l) dact[l].assign(fc.act[l].size(), 0.0);

    std::vector<double> delta(dLdy.begin(), dLdy.end());
    for (int l = layers - 1; l >= 0; --l) {
        const Tensor& w = p.weight(l);
        Tensor& gw = g[2 * l];
        Tensor& gb = g[2 * l + 1];
        for (int r = 0; r < w.rows; ++r) {
            gb.v[r] = delta[r];
            for (int c = 0; c < w.cols; ++c)
                gw.at(r, c) = delta[r] * fc.act[l][c];
        }
        if (l == 0) break;
        for (int r = 0; r < w.rows; ++r)
            for (int c = 0; c < w.cols; ++c)
                dact[l][c] += w.at(r, c) * delta[r];
        if (p.spec.residual_active() && l == layers - 2)
            for (std::size_t i = 0; i < delta.size(); ++i) dact[1][i] += delta[i];
        delta.assign(dact[l].size(), 0.0);
        for (std::size_t i = 0; i < delta.size(); ++i)
            delta[i] = dact[l][i] * (fc.pre[l - 1][i] >= 0.0 ? 1.0 : slope);
    }
    return g;
}

Gradient v_gradient(const NetworkParameters& p, const Features& x) {
    const Outputs y = forward(p, x);
    Outputs onehot{0.0, 0.0, 0.0};
    onehot[output_argmax(y)] = 1.0;
    return backward(p, x, onehot);
}

EligibilityTrace zero_trace(const NetworkParameters& p) {
    EligibilityTrace e;
    e.reserve(p.tensors.size());
    for (const Tensor& t : p.tensors) e.emplace_back(t.rows, t.cols);
    return e;
}

void trace_accumulate(EligibilityTrace& e, const Gradient& g, double gamma, double lambda) {
    check_shapes(e, g, "trace_accumulate");
    const double decay = gamma * lambda;
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t k = 0; k < e[i].v.size(); ++k)
            e[i].v[k] = decay * e[i].v[k] + g[i].v[k];
}

void trace_reset(EligibilityTrace& e) {
    for (Tensor& t : e)
        std::fill(t.v.begin(), t.v.end(), 0.0);
}

void td_update(NetworkParameters& p, const EligibilityTrace& e, double r,
               double v_s, double v_s_next, const LearnerConfig& cfg) {
    check_shapes(p.tensors, e, "td_update");
    const double delta = r + cfg.gamma * v_s_next - v_s;
    if (!std::isfinite(delta)) throw std::domain_error("td_update: non-finite TD error");
    const double step = cfg.beta * delta;
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t k = 0; k < e[i].v.size(); ++k)
            p.tensors[i].v[k] += step * e[i].v[k];
}

void apply_gradient(NetworkParameters& p, const Gradient& g, double scale) {
    check_shapes(p.tensors, g, "apply_gradient");
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t k = 0; k < g[i].v.size(); ++k)
            p.tensors[i].v[k] += scale * g[i].v[k];
}

void save_checkpoint(const NetworkParameters& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out.write("ERLW", 4);
    const unsigned char version = 1;
    out.put(static_cast<char>(version));
    const std::uint32_t count = static_cast<std::uint32_t>(p.tensors.size());
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    for (const Tensor& t : p.tensors) {
        const std::uint32_t r = t.rows, c = t.cols;
        out.write(reinterpret_cast<const char*>(&r), sizeof(r));
        out.write(reinterpret_cast<const char*>(&c), sizeof(c));
        out.write(reinterpret_cast<const char*>(t.v.data()),
                  static_cast<std::streamsize>(t.v.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

NetworkParameters load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "ERLW", 4) != 0)
        throw std::runtime_error("load_checkpoint: bad magic in " + path);
    const int version = in.get();
    if (version != 1) throw std::runtime_error("load_checkpoint: unsupported version");
    std::uint32_t count = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (!in || count == 0 || count % 2 != 0)
        throw std::runtime_error("load_checkpoint: bad tensor count");
    std::vector<Tensor> tensors;
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t r = 0, c = 0;
        in.read(reinterpret_cast<char*>(&r), sizeof(r));
        in.read(reinterpret_cast<char*>(&c), sizeof(c));
        if (!in || r == 0 || c == 0 || r > 100000 || c > 100000)
            throw std::runtime_error("load_checkpoint: bad tensor header");
        Tensor t(static_cast<int>(r), static_cast<int>(c));
        in.read(reinterpret_cast<char*>(t.v.data()),
                static_cast<std::streamsize>(t.v.size() * sizeof(double)));
        if (!in) throw std::runtime_error("load_checkpoint: truncated tensor data");
        tensors.push_back(std::move(t));
    }
    NetworkParameters p;
    p.spec.input_dim = tensors[0].cols;
    p.spec.hidden.clear();
    for (std::size_t l = 0; 2 * l + 2 < tensors.size(); ++l)
        p.spec.hidden.push_back(tensors[2 * l].rows);
    p.spec.output_dim = tensors[tensors.size() - 2].rows;
    p.spec.validate();
    p.tensors = std::move(tensors);
    return p;
}

} // namespace qsc::net
