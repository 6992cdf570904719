#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rdf/errors.hpp"

namespace rdf {

enum class BlendMode : uint8_t { Softmax = 0, Mean = 1, Alpha = 2, Sigmoid = 3 };

const char* blend_mode_name(BlendMode mode);
BlendMode blend_mode_from_name(const std::string& name);

struct BlendConfig {
    BlendMode mode = BlendMode::Softmax;
    int t_train = 5;
    int t_test = 5;
};

// Per-candidate blend inputs: rho = ||p_cam - p_l||, (d, s) from the field.
// All modes produce convex weights, so D lies within [min, max] of the
// per-candidate values rho + d. Alpha mode orders candidates front to back
// by (rho, index) before compositing.
template <typename T>
struct BlendResult {
    T value = T(0);                 // D
    std::vector<T> weights;         // convex, in input order
};

template <typename T>
inline T stable_sigmoid(T x) {
    if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
    T e = std::exp(x);
    return e / (T(1) + e);
}

template <typename T>
BlendResult<T> blend(std::span<const T> rho, std::span<const T> d, std::span<const T> s,
                     BlendMode mode) {
    const std::size_t n = rho.size();
    if (n == 0) throw InvalidParameter("blend: empty candidate set");
    if (d.size() != n || s.size() != n) throw ShapeError("blend: candidate array size mismatch");

    BlendResult<T> out;
    out.weights.assign(n, T(0));
    switch (mode) {
        case BlendMode::Softmax: {
            T smax = *std::max_element(s.begin(), s.end());
            T denom = T(0);
            for (std::size_t i = 0; i < n; ++i) {
                out.weights[i] = std::exp(s[i] - smax);
                denom += out.weights[i];
            }
            for (std::size_t i = 0; i < n; ++i) out.weights[i] /= denom;
            break;
        }
        case BlendMode::Mean: {
            for (std::size_t i = 0; i < n; ++i) out.weights[i] = T(1) / static_cast<T>(n);
            break;
        }
        case BlendMode::Sigmoid: {
            T denom = T(0);
            for (std::size_t i = 0; i < n; ++i) {
                out.weights[i] = stable_sigmoid(s[i]);
                denom += out.weights[i];
            }
            for (std::size_t i = 0; i < n; ++i) out.weights[i] /= denom;
            break;
        }
        case BlendMode::Alpha: {
            // Front-to-back transmittance over sigmoid opacities, then
            // renormalized so the convex-combination contract holds.
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0u);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return rho[a] != rho[b] ? rho[a] < rho[b] : a < b;
            });
            T transmittance = T(1);
            T denom = T(0);
            for (std::size_t k = 0; k < n; ++k) {
                std::size_t i = order[k];
                T a = stable_sigmoid(s[i]);
                out.weights[i] = a * transmittance;
                transmittance *= (T(1) - a);
                denom += out.weights[i];
            }
            for (std::size_t i = 0; i < n; ++i) out.weights[i] /= denom;
            break;
        }
    }
    T value = T(0);
    for (std::size_t i = 0; i < n; ++i) value += out.weights[i] * (rho[i] + d[i]);
    out.value = value;
    return out;
}

// Gradients of D w.r.t. each candidate's d and s given dL/dD.
template <typename T>
void blend_backward(std::span<const T> rho, std::span<const T> d, std::span<const T> s,
                    BlendMode mode, const BlendResult<T>& fwd, T dvalue, std::span<T> grad_d,
                    std::span<T> grad_s) {
    const std::size_t n = rho.size();
    std::vector<T> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = rho[i] + d[i];
        grad_d[i] = dvalue * fwd.weights[i];
        grad_s[i] = T(0);
    }
    switch (mode) {
        case BlendMode::Mean:
            break;
        case BlendMode::Softmax: {
            for (std::size_t i = 0; i < n; ++i)
                grad_s[i] = dvalue * fwd.weights[i] * (v[i] - fwd.value);
            break;
        }
        case BlendMode::Sigmoid: {
            T denom = T(0);
            for (std::size_t i = 0; i < n; ++i) denom += stable_sigmoid(s[i]);
            for (std::size_t i = 0; i < n; ++i) {
                T a = stable_sigmoid(s[i]);
                grad_s[i] = dvalue * a * (T(1) - a) * (v[i] - fwd.value) / denom;
            }
            break;
        }
        case BlendMode::Alpha: {
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0u);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return rho[a] != rho[b] ? rho[a] < rho[b] : a < b;
            });
            std::vector<T> a(n);
            for (std::size_t i = 0; i < n; ++i) a[i] = stable_sigmoid(s[i]);
            // Unnormalized weights in composite order.
            std::vector<T> w_tilde(n);
            T denom = T(0);
            {
                T transmittance = T(1);
                for (std::size_t k = 0; k < n; ++k) {
                    std::size_t i = order[k];
                    w_tilde[k] = a[i] * transmittance;
                    transmittance *= (T(1) - a[i]);
                    denom += w_tilde[k];
                }
            }
            // dD/dw_tilde_k = (v_k - D) / denom after renormalization.
            std::vector<T> g_wt(n);
            for (std::size_t k = 0; k < n; ++k)
                g_wt[k] = dvalue * (v[order[k]] - fwd.value) / denom;
            // dw_tilde_t/da_j: t == j gives the prefix transmittance;
            // j < t flips the (1 - a_j) factor's sign.
            for (std::size_t j = 0; j < n; ++j) {
                T acc = T(0);
                for (std::size_t t = j; t < n; ++t) {
                    T partial;
                    if (t == j) {
                        partial = T(1);
                        for (std::size_t k = 0; k < t; ++k) partial *= (T(1) - a[order[k]]);
                    } else {
                        partial = -a[order[t]];
                        for (std::size_t k = 0; k < t; ++k)
                            if (k != j) partial *= (T(1) - a[order[k]]);
                    }
                    acc += g_wt[t] * partial;
                }
                std::size_t i = order[j];
                grad_s[i] = acc * a[i] * (T(1) - a[i]);
            }
            break;
        }
    }
}

}  // namespace rdf
