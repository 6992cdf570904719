#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rdf/blend.hpp"
#include "rdf/camera.hpp"
#include "rdf/depthmap.hpp"
#include "rdf/features.hpp"
#include "rdf/mlp.hpp"
#include "rdf/sampling.hpp"
#include "rdf/scene.hpp"

namespace rdf {

// The trainable state: the field MLP plus the per-point feature table that
// stands in for a learned backbone. Instantiated in float for training and
// inference, in double for finite-difference gradient checks.
template <typename T>
struct FieldModel {
    MlpConfig mlp_cfg;
    FeatureLayout layout;
    BlendMode blend_mode = BlendMode::Softmax;
    FeatureMode feature_mode = FeatureMode::LearnableTable;

    Mlp<T> mlp;
    std::vector<T> feature_table;  // N x C row-major; empty when channels == 0
    std::size_t scene_points = 0;

    static FieldModel make(const FeatureLayout& layout, BlendMode mode, FeatureMode fmode,
                           std::size_t scene_points, int hidden = 256, int hidden_layers = 8) {
        FieldModel m;
        m.layout = layout;
        m.blend_mode = mode;
        m.feature_mode = fmode;
        m.scene_points = scene_points;
        m.mlp_cfg = MlpConfig{layout.input_width(), hidden, hidden_layers, 2};
        m.mlp = Mlp<T>(m.mlp_cfg);
        if (layout.channels > 0)
            m.feature_table.assign(scene_points * static_cast<std::size_t>(layout.channels), T(0));
        return m;
    }

    void initialize(uint64_t seed) {
        std::mt19937_64 rng(seed);
        mlp.initialize(rng);
        if (!feature_table.empty()) {
            std::normal_distribution<double> dist(0.0, 0.1);
            for (T& v : feature_table) v = static_cast<T>(dist(rng));
        }
    }

    std::size_t param_count() const { return mlp.params().size() + feature_table.size(); }
    T& param(std::size_t i) {
        return i < mlp.params().size() ? mlp.params()[i]
                                       : feature_table[i - mlp.params().size()];
    }
    T param(std::size_t i) const {
        return i < mlp.params().size() ? mlp.params()[i]
                                       : feature_table[i - mlp.params().size()];
    }
};

// Compact per-ray training records; feature vectors are re-assembled from
// neighbor indices at every visit instead of being stored.
struct TrainingSet {
    FeatureLayout layout;
    std::vector<Vec3> positions;      // scene point / Gaussian centers
    std::vector<float> ray_gt;        // ground-truth ray-surface distance per ray
    std::vector<uint32_t> ray_begin;  // into the raylet pool; size rays+1
    std::vector<Vec3> raylet_start;
    std::vector<Vec3> raylet_dir;
    std::vector<float> raylet_rho;    // ||p_cam - p_l||
    std::vector<int> raylet_neighbors;  // K per raylet

    std::size_t ray_count() const { return ray_gt.size(); }
    std::size_t raylet_count(std::size_t ray) const {
        return ray_begin[ray + 1] - ray_begin[ray];
    }
};

struct TrainView {
    Camera camera;
    DepthMap gt;  // ray-surface distances
};

struct TrainConfig {
    uint64_t seed = 0;
    int steps = 2000;
    int batch_rays = 128;
    double lr = 1e-3;
    double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    bool cosine_decay = true;
    int t_train = 5;
    int tile_px = 16;
    BlendMode blend_mode = BlendMode::Softmax;
    FeatureLayout layout{};  // K=5, C=32, Both by default
    FeatureMode feature_mode = FeatureMode::LearnableTable;
    int hidden = 256;
    int hidden_layers = 8;
};

// Samples <= T raylet candidates per valid ground-truth pixel; rays with no
// candidates are dropped. Throws when nothing survives.
TrainingSet build_training_set(const SceneGeometry& scene, std::span<const TrainView> views,
                               const TrainConfig& cfg);

// l1 loss with sign subgradient (0 at exact equality).
template <typename T>
inline T loss_l1(T pred, T gt, T* grad = nullptr) {
    T diff = pred - gt;
    if (grad) *grad = diff > T(0) ? T(1) : (diff < T(0) ? T(-1) : T(0));
    return std::abs(diff);
}

// Scratch buffers reused across rays in one gradient evaluation.
template <typename T>
struct FieldWorkspace {
    std::vector<std::vector<T>> inputs;        // per raylet
    std::vector<MlpWorkspace<T>> fwd_per;      // cached activations per raylet
    MlpWorkspace<T> bwd;
    std::vector<T> rho, d, s, grad_d, grad_s, dinput;
};

// Mean l1 loss over the given rays; accumulates gradients w.r.t. all model
// parameters (MLP first, feature table after) into grads. grads must be
// zero-initialized by the caller and sized model.param_count().
template <typename T>
T compute_batch_gradient(const FieldModel<T>& model, const TrainingSet& set,
                         std::span<const uint32_t> ray_ids, std::vector<T>& grads);

// Forward-only D prediction for one ray of a training set (diagnostics).
template <typename T>
T predict_ray(const FieldModel<T>& model, const TrainingSet& set, std::size_t ray);

struct TrainResult {
    FieldModel<float> model;
    std::vector<std::pair<int, double>> loss_trace;  // (step, batch loss)
    std::size_t train_rays = 0;
};

TrainResult train(const SceneGeometry& scene, std::span<const TrainView> views,
                  const TrainConfig& cfg);
TrainResult train(const TrainingSet& set, const TrainConfig& cfg);

}  // namespace rdf
