#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rdf/errors.hpp"
#include "rdf/kernels.hpp"

namespace rdf {

// Field network: in_dim -> hidden (ReLU), hidden_layers x hidden -> hidden
// (ReLU), hidden -> out_dim (linear). out_dim = 2 for (d_l, s_l).
struct MlpConfig {
    int in_dim = 0;
    int hidden = 256;
    int hidden_layers = 8;
    int out_dim = 2;

    int num_linear() const { return hidden_layers + 2; }
    int layer_in(int l) const { return l == 0 ? in_dim : hidden; }
    int layer_out(int l) const { return l == num_linear() - 1 ? out_dim : hidden; }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (int l = 0; l < num_linear(); ++l)
            n += static_cast<std::size_t>(layer_out(l)) * layer_in(l) + layer_out(l);
        return n;
    }
};

// Scratch activations for one forward/backward pass; reuse across samples.
template <typename T>
struct MlpWorkspace {
    std::vector<std::vector<T>> act;   // act[l] = output of linear layer l (post-ReLU except last)
    std::vector<T> delta, delta_next;

    void resize(const MlpConfig& cfg) {
        act.resize(static_cast<std::size_t>(cfg.num_linear()));
        for (int l = 0; l < cfg.num_linear(); ++l)
            act[static_cast<std::size_t>(l)].resize(static_cast<std::size_t>(cfg.layer_out(l)));
        delta.resize(static_cast<std::size_t>(std::max(cfg.hidden, cfg.out_dim)));
        delta_next.resize(static_cast<std::size_t>(std::max(cfg.in_dim, cfg.hidden)));
    }
};

template <typename T>
class Mlp {
public:
    Mlp() = default;
    explicit Mlp(const MlpConfig& cfg) : cfg_(cfg), params_(cfg.param_count(), T(0)) {
        if (cfg.in_dim < 1 || cfg.hidden < 1 || cfg.hidden_layers < 0 || cfg.out_dim < 1)
            throw InvalidParameter("Mlp: invalid configuration");
        offsets_.resize(static_cast<std::size_t>(cfg.num_linear()));
        std::size_t off = 0;
        for (int l = 0; l < cfg.num_linear(); ++l) {
            offsets_[static_cast<std::size_t>(l)] = off;
            off += static_cast<std::size_t>(cfg.layer_out(l)) * cfg.layer_in(l) + cfg.layer_out(l);
        }
    }

    const MlpConfig& config() const { return cfg_; }
    std::vector<T>& params() { return params_; }
    const std::vector<T>& params() const { return params_; }

    T* weights(int l) { return params_.data() + offsets_[static_cast<std::size_t>(l)]; }
    const T* weights(int l) const { return params_.data() + offsets_[static_cast<std::size_t>(l)]; }
    T* bias(int l) {
        return weights(l) + static_cast<std::size_t>(cfg_.layer_out(l)) * cfg_.layer_in(l);
    }
    const T* bias(int l) const {
        return weights(l) + static_cast<std::size_t>(cfg_.layer_out(l)) * cfg_.layer_in(l);
    }

    // Kaiming-uniform fan-in weights, zero biases.
    void initialize(std::mt19937_64& rng) {
        for (int l = 0; l < cfg_.num_linear(); ++l) {
            double bound = std::sqrt(6.0 / cfg_.layer_in(l));
            std::uniform_real_distribution<double> dist(-bound, bound);
            T* w = weights(l);
            std::size_t n = static_cast<std::size_t>(cfg_.layer_out(l)) * cfg_.layer_in(l);
            for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<T>(dist(rng));
            T* b = bias(l);
            for (int i = 0; i < cfg_.layer_out(l); ++i) b[i] = T(0);
        }
    }

    // Output lands in ws.act.back(); returns (d, s) as the first two entries.
    void forward(std::span<const T> input, MlpWorkspace<T>& ws) const {
        if (static_cast<int>(input.size()) != cfg_.in_dim)
            throw ShapeError("Mlp::forward: input width mismatch");
        const T* x = input.data();
        for (int l = 0; l < cfg_.num_linear(); ++l) {
            T* out = ws.act[static_cast<std::size_t>(l)].data();
            kern::matvec(weights(l), x, bias(l), out, cfg_.layer_out(l), cfg_.layer_in(l));
            if (l != cfg_.num_linear() - 1) kern::relu(out, cfg_.layer_out(l));
            x = out;
        }
    }

    // Accumulates parameter gradients into grads (layout matches params());
    // optionally produces the gradient w.r.t. the input.
    void backward(std::span<const T> input, const MlpWorkspace<T>& ws_fwd,
                  std::span<const T> dout, T* grads, MlpWorkspace<T>& ws,
                  T* dinput = nullptr) const {
        ws.delta.assign(dout.begin(), dout.end());
        for (int l = cfg_.num_linear() - 1; l >= 0; --l) {
            const T* in = l == 0 ? input.data() : ws_fwd.act[static_cast<std::size_t>(l - 1)].data();
            T* gw = grads + offsets_[static_cast<std::size_t>(l)];
            T* gb = gw + static_cast<std::size_t>(cfg_.layer_out(l)) * cfg_.layer_in(l);
            kern::ger(gw, ws.delta.data(), in, cfg_.layer_out(l), cfg_.layer_in(l));
            for (int i = 0; i < cfg_.layer_out(l); ++i) gb[i] += ws.delta[static_cast<std::size_t>(i)];
            if (l == 0 && !dinput) break;
            T* dnext = l == 0 ? dinput : ws.delta_next.data();
            kern::matvec_t(weights(l), ws.delta.data(), dnext, cfg_.layer_out(l), cfg_.layer_in(l));
            if (l > 0) {
                // ReLU mask from the cached post-activation of the previous layer.
                kern::relu_backward(in, dnext, cfg_.layer_in(l));
                std::copy(dnext, dnext + cfg_.layer_in(l), ws.delta.begin());
            }
        }
    }

private:
    MlpConfig cfg_;
    std::vector<T> params_;
    std::vector<std::size_t> offsets_;
};

}  // namespace rdf
