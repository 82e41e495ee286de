#pragma once

// Small dense networks with hand-written reverse-mode gradients.
//
// Just enough machinery for a SAC policy, twin critics, and a GAIL
// discriminator: fixed feed-forward stacks, relu or tanh hidden activations,
// and one of three heads. No graphs, no broadcasting, doubles only so the
// finite-difference checks have headroom.
//
// Heads:
//   linear   - raw last layer (critics)
//   sigmoid  - scalar probability in (0,1) (discriminator)
//   gaussian - last layer holds (mean, log_std) halves; log_std clamped to
//              [-20, 2]. Sampling and the tanh log-prob correction live in
//              gaussian_head_sample / GaussianPolicyOps below.
//
// Ownership: one trainer mutates a net; forward fills a caller-owned Cache so
// concurrent read-only evaluation of a snapshot stays safe.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "satrl/rng.hpp"

namespace satrl {

enum class Activation { tanh, relu };
enum class Head { linear, gaussian, sigmoid };

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

struct Layer {
    int in = 0, out = 0;
    std::vector<double> w;  // row-major, out x in
    std::vector<double> b;  // out
};

struct LayerGrad {
    std::vector<double> w, b;
};
using NetGrad = std::vector<LayerGrad>;

class MlpNet {
public:
    std::vector<int> layer_dims;  // input, hidden..., raw output width
    Activation activation = Activation::relu;
    Head head = Head::linear;
    std::vector<Layer> layers;

    struct Cache {
        std::vector<double> input;
        std::vector<std::vector<double>> pre;   // pre-activation per layer
        std::vector<std::vector<double>> post;  // post-activation per layer (last = head output)
        bool valid = false;
    };

    // Seeded uniform fan-in init: W, b ~ U[-1/sqrt(fan_in), 1/sqrt(fan_in)].
    static MlpNet make(std::vector<int> dims, Activation act, Head hd, Rng& rng) {
        if (dims.size() < 2) throw std::invalid_argument("MlpNet: need at least input and output dims");
        MlpNet net;
        net.layer_dims = std::move(dims);
        net.activation = act;
        net.head = hd;
        for (size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
            Layer layer;
            layer.in = net.layer_dims[l];
            layer.out = net.layer_dims[l + 1];
            const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
            layer.w.resize(static_cast<size_t>(layer.in) * layer.out);
            layer.b.resize(layer.out);
            for (auto& v : layer.w) v = rng.uniform(-bound, bound);
            for (auto& v : layer.b) v = rng.uniform(-bound, bound);
            net.layers.push_back(std::move(layer));
        }
        return net;
    }

    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }

    size_t param_count() const {
        size_t n = 0;
        for (const auto& l : layers) n += l.w.size() + l.b.size();
        return n;
    }

    NetGrad zero_grad() const {
        NetGrad g(layers.size());
        for (size_t i = 0; i < layers.size(); ++i) {
            g[i].w.assign(layers[i].w.size(), 0.0);
            g[i].b.assign(layers[i].b.size(), 0.0);
        }
        return g;
    }

    std::vector<double> forward(std::span<const double> x) const {
        Cache scratch;
        return forward(x, scratch);
    }

    std::vector<double> forward(std::span<const double> x, Cache& cache) const {
        if (static_cast<int>(x.size()) != input_dim())
            throw std::invalid_argument("MlpNet::forward: input size " + std::to_string(x.size()) +
                                        " != " + std::to_string(input_dim()));
        cache.input.assign(x.begin(), x.end());
        cache.pre.assign(layers.size(), {});
        cache.post.assign(layers.size(), {});

        const std::vector<double>* cur = &cache.input;
        for (size_t l = 0; l < layers.size(); ++l) {
            const Layer& layer = layers[l];
            auto& pre = cache.pre[l];
            pre.assign(layer.out, 0.0);
            for (int o = 0; o < layer.out; ++o) {
                const double* wrow = layer.w.data() + static_cast<size_t>(o) * layer.in;
                double s = layer.b[o];
                for (int i = 0; i < layer.in; ++i) s += wrow[i] * (*cur)[i];
                pre[o] = s;
            }
            auto& post = cache.post[l];
            post = pre;
            if (l + 1 < layers.size()) {
                for (auto& v : post) v = activation == Activation::relu ? (v > 0 ? v : 0.0) : std::tanh(v);
            } else {
                apply_head(post);
            }
            cur = &post;
        }
        cache.valid = true;
        return cache.post.back();
    }

    // Reverse pass. upstream is d(loss)/d(head output). Accumulates into
    // grad (+=) so batches can share one NetGrad; optionally reports
    // d(loss)/d(input), which the policy loss needs to reach the critic's
    // action inputs.
    void backward(const Cache& cache, std::span<const double> upstream, NetGrad& grad,
                  std::vector<double>* input_grad = nullptr) const {
        if (!cache.valid) throw std::logic_error("MlpNet::backward called without a forward cache");
        if (static_cast<int>(upstream.size()) != output_dim())
            throw std::invalid_argument("MlpNet::backward: upstream size mismatch");
        if (grad.size() != layers.size()) throw std::invalid_argument("MlpNet::backward: grad shape mismatch");

        std::vector<double> delta(upstream.begin(), upstream.end());
        head_backward(cache.post.back(), delta);

        for (size_t l = layers.size(); l-- > 0;) {
            const Layer& layer = layers[l];
            if (l + 1 < layers.size()) {
                // chain through the hidden activation of layer l
                const auto& pre = cache.pre[l];
                const auto& post = cache.post[l];
                for (int o = 0; o < layer.out; ++o)
                    delta[o] *= activation == Activation::relu ? (pre[o] > 0 ? 1.0 : 0.0) : 1.0 - post[o] * post[o];
            }
            const std::vector<double>& below = l == 0 ? cache.input : cache.post[l - 1];
            auto& gw = grad[l].w;
            auto& gb = grad[l].b;
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[o];
                gb[o] += d;
                double* grow = gw.data() + static_cast<size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) grow[i] += d * below[i];
            }
            if (l > 0 || input_grad) {
                std::vector<double> next(layer.in, 0.0);
                for (int o = 0; o < layer.out; ++o) {
                    const double d = delta[o];
                    const double* wrow = layer.w.data() + static_cast<size_t>(o) * layer.in;
                    for (int i = 0; i < layer.in; ++i) next[i] += d * wrow[i];
                }
                if (l == 0) {
                    *input_grad = std::move(next);
                    break;
                }
                delta = std::move(next);
            }
        }
    }

private:
    void apply_head(std::vector<double>& out) const {
        switch (head) {
            case Head::linear:
                break;
            case Head::sigmoid:
                for (auto& v : out) v = 1.0 / (1.0 + std::exp(-v));
                break;
            case Head::gaussian: {
                if (out.size() % 2 != 0) throw std::logic_error("gaussian head needs an even raw width");
                for (size_t i = out.size() / 2; i < out.size(); ++i)
                    out[i] = out[i] < kLogStdMin ? kLogStdMin : (out[i] > kLogStdMax ? kLogStdMax : out[i]);
                break;
            }
        }
    }

    // delta arrives as d(loss)/d(head output); rewrite as d(loss)/d(raw pre).
    void head_backward(const std::vector<double>& head_out, std::vector<double>& delta) const {
        switch (head) {
            case Head::linear:
                break;
            case Head::sigmoid:
                for (size_t i = 0; i < delta.size(); ++i) delta[i] *= head_out[i] * (1.0 - head_out[i]);
                break;
            case Head::gaussian:
                // clamp: zero slope outside the active range
                for (size_t i = delta.size() / 2; i < delta.size(); ++i)
                    if (head_out[i] <= kLogStdMin || head_out[i] >= kLogStdMax) delta[i] = 0.0;
                break;
        }
    }
};

inline void scale_grad(NetGrad& g, double s) {
    for (auto& l : g) {
        for (auto& v : l.w) v *= s;
        for (auto& v : l.b) v *= s;
    }
}

// ---------------------------------------------------------------------------
// Adam

struct AdamState {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step_count = 0;
    NetGrad m, v;

    static AdamState for_net(const MlpNet& net) {
        AdamState s;
        s.m = net.zero_grad();
        s.v = net.zero_grad();
        return s;
    }
};

// One bias-corrected Adam update. Non-finite gradients are a training fault
// and throw rather than being skipped.
inline void adam_step(AdamState& state, MlpNet& net, const NetGrad& grad, double lr) {
    if (state.m.size() != net.layers.size()) throw std::invalid_argument("adam_step: state/net mismatch");
    ++state.step_count;
    const double bc1 = 1.0 - std::pow(state.beta1, state.step_count);
    const double bc2 = 1.0 - std::pow(state.beta2, state.step_count);
    for (size_t l = 0; l < net.layers.size(); ++l) {
        auto upd = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                       std::vector<double>& v) {
            for (size_t i = 0; i < p.size(); ++i) {
                const double gi = g[i];
                if (!std::isfinite(gi)) throw std::runtime_error("adam_step: non-finite gradient");
                m[i] = state.beta1 * m[i] + (1 - state.beta1) * gi;
                v[i] = state.beta2 * v[i] + (1 - state.beta2) * gi * gi;
                p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + state.eps);
            }
        };
        upd(net.layers[l].w, grad[l].w, state.m[l].w, state.v[l].w);
        upd(net.layers[l].b, grad[l].b, state.m[l].b, state.v[l].b);
    }
}

// Scalar Adam for the entropy temperature.
struct ScalarAdam {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step_count = 0;
    double m = 0, v = 0;

    void step(double& param, double grad, double lr) {
        if (!std::isfinite(grad)) throw std::runtime_error("ScalarAdam: non-finite gradient");
        ++step_count;
        m = beta1 * m + (1 - beta1) * grad;
        v = beta2 * v + (1 - beta2) * grad * grad;
        const double mh = m / (1.0 - std::pow(beta1, step_count));
        const double vh = v / (1.0 - std::pow(beta2, step_count));
        param -= lr * mh / (std::sqrt(vh) + eps);
    }
};

// ---------------------------------------------------------------------------
// Tanh-squashed gaussian head

inline constexpr double kSquashEps = 1e-6;  // keeps log(1 - a^2) finite at the rails
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

struct GaussianSample {
    std::vector<double> noise;       // the N(0,1) draws, fixed for reparameterized grads
    std::vector<double> pre_squash;  // u = mean + std * noise
    std::vector<double> action;      // tanh(u), in (-1, 1)
    double log_prob = 0.0;
};

// log N(u; mean, std) - sum log(1 - tanh(u)^2 + eps), with u = mean + std*z.
// Because z is held fixed, the normal term reduces to -z^2/2 - log_std - log sqrt(2pi).
inline GaussianSample squash_with_noise(std::span<const double> mean, std::span<const double> log_std,
                                        std::vector<double> noise) {
    GaussianSample s;
    s.noise = std::move(noise);
    const size_t k = mean.size();
    s.pre_squash.resize(k);
    s.action.resize(k);
    s.log_prob = 0.0;
    for (size_t i = 0; i < k; ++i) {
        const double std_i = std::exp(log_std[i]);
        const double u = mean[i] + std_i * s.noise[i];
        const double a = std::tanh(u);
        s.pre_squash[i] = u;
        s.action[i] = a;
        s.log_prob += -0.5 * s.noise[i] * s.noise[i] - log_std[i] - kLogSqrt2Pi - std::log(1.0 - a * a + kSquashEps);
    }
    return s;
}

inline GaussianSample gaussian_head_sample(std::span<const double> mean, std::span<const double> log_std, Rng& rng) {
    std::vector<double> z(mean.size());
    for (auto& v : z) v = rng.normal();
    return squash_with_noise(mean, log_std, std::move(z));
}

// Gradients of log_prob and of the action wrt (mean, log_std) with the noise
// held fixed; everything the SAC policy loss needs from this head.
struct SquashGrads {
    std::vector<double> dlogp_dmean, dlogp_dlogstd;
    std::vector<double> daction_dmean, daction_dlogstd;  // diagonal Jacobians
};

inline SquashGrads squash_grads(const GaussianSample& s, std::span<const double> log_std) {
    const size_t k = s.action.size();
    SquashGrads g;
    g.dlogp_dmean.resize(k);
    g.dlogp_dlogstd.resize(k);
    g.daction_dmean.resize(k);
    g.daction_dlogstd.resize(k);
    for (size_t i = 0; i < k; ++i) {
        const double a = s.action[i];
        const double one_m_a2 = 1.0 - a * a;
        const double du_dlogstd = std::exp(log_std[i]) * s.noise[i];  // d(mean + e^ls z)/d(ls)
        const double dlogp_du = 2.0 * a * one_m_a2 / (one_m_a2 + kSquashEps);
        g.dlogp_dmean[i] = dlogp_du;
        g.dlogp_dlogstd[i] = -1.0 + dlogp_du * du_dlogstd;
        g.daction_dmean[i] = one_m_a2;
        g.daction_dlogstd[i] = one_m_a2 * du_dlogstd;
    }
    return g;
}

}  // namespace satrl
