#include "rdf/field.hpp"

#include <cmath>
#include <numbers>

namespace rdf {

TrainingSet build_training_set(const SceneGeometry& scene, std::span<const TrainView> views,
                               const TrainConfig& cfg) {
    if (views.empty()) throw InvalidParameter("build_training_set: need at least one view");

    TrainingSet set;
    set.layout = cfg.layout;
    std::size_t n = scene_size(scene);
    set.positions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) set.positions.push_back(scene_position(scene, i));
    PointGrid grid(set.positions);

    const VirtualBallSet* balls = nullptr;
    VirtualBallSet ball_storage;
    if (const auto* pc = std::get_if<PointCloud>(&scene)) {
        ball_storage = compute_ball_radii(*pc);
        balls = &ball_storage;
    }
    const GaussianSet* gaussians = std::get_if<GaussianSet>(&scene);

    set.ray_begin.push_back(0);
    std::vector<int> nbrs;
    for (const TrainView& view : views) {
        std::unique_ptr<RayletSampler> sampler;
        if (balls)
            sampler = std::make_unique<RayletSampler>(view.camera, *balls, cfg.tile_px);
        else
            sampler = std::make_unique<RayletSampler>(view.camera, *gaussians, cfg.tile_px);
        for (int y = 0; y < view.camera.height; ++y) {
            for (int x = 0; x < view.camera.width; ++x) {
                if (!view.gt.is_valid(x, y)) continue;
                float gt = view.gt.at(x, y);
                if (!(gt > 0.0f)) continue;  // skip-sample: non-positive ground truth
                double u = x + 0.5, v = y + 0.5;
                Ray ray = generate_ray(view.camera, u, v);
                auto cands = sampler->candidates(ray, u, v, cfg.t_train);
                if (cands.empty()) continue;  // ray discarded
                for (const RayletCandidate& c : cands) {
                    set.raylet_start.push_back(c.raylet.start);
                    set.raylet_dir.push_back(c.raylet.direction);
                    set.raylet_rho.push_back(static_cast<float>(c.raylet.t_start));
                    nbrs = grid.knn(c.raylet.start, cfg.layout.k);
                    set.raylet_neighbors.insert(set.raylet_neighbors.end(), nbrs.begin(),
                                                nbrs.end());
                }
                set.ray_gt.push_back(gt);
                set.ray_begin.push_back(static_cast<uint32_t>(set.raylet_start.size()));
            }
        }
    }
    if (set.ray_gt.empty())
        throw DegenerateInput("build_training_set: all rays were discarded (no supervision)");
    return set;
}

namespace {

template <typename T>
void ensure_workspace(FieldWorkspace<T>& ws, const FieldModel<T>& model, std::size_t t_max) {
    bool compatible = !ws.inputs.empty() && ws.inputs.size() >= t_max &&
                      static_cast<int>(ws.inputs[0].size()) == model.mlp_cfg.in_dim &&
                      static_cast<int>(ws.fwd_per[0].act.size()) ==
                          model.mlp_cfg.num_linear() &&
                      static_cast<int>(ws.fwd_per[0].act.back().size()) == model.mlp_cfg.out_dim &&
                      static_cast<int>(ws.fwd_per[0].act.front().size()) == model.mlp_cfg.hidden;
    if (compatible) return;
    ws.inputs.assign(t_max, {});
    ws.fwd_per.assign(t_max, {});
    ws.inputs.resize(t_max);
    ws.fwd_per.resize(t_max);
    for (std::size_t j = 0; j < t_max; ++j) {
        ws.inputs[j].resize(static_cast<std::size_t>(model.mlp_cfg.in_dim));
        ws.fwd_per[j].resize(model.mlp_cfg);
    }
    ws.bwd.resize(model.mlp_cfg);
    ws.rho.resize(t_max);
    ws.d.resize(t_max);
    ws.s.resize(t_max);
    ws.grad_d.resize(t_max);
    ws.grad_s.resize(t_max);
    ws.dinput.resize(static_cast<std::size_t>(model.mlp_cfg.in_dim));
}

template <typename T>
void fill_ray_inputs(const FieldModel<T>& model, const TrainingSet& set, std::size_t ray,
                     FieldWorkspace<T>& ws, std::size_t& n_out) {
    const std::size_t begin = set.ray_begin[ray];
    const std::size_t n = set.ray_begin[ray + 1] - begin;
    n_out = n;
    const int k = set.layout.k;
    const T* table = model.feature_table.empty() ? nullptr : model.feature_table.data();
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t r = begin + j;
        std::span<const int> nbrs(set.raylet_neighbors.data() + r * static_cast<std::size_t>(k),
                                  static_cast<std::size_t>(k));
        fill_raylet_input<T>(
            set.raylet_start[r], set.raylet_dir[r], nbrs,
            [&](int idx) { return set.positions[static_cast<std::size_t>(idx)]; }, table,
            set.layout, ws.inputs[j].data());
        ws.rho[j] = static_cast<T>(set.raylet_rho[r]);
        model.mlp.forward(std::span<const T>(ws.inputs[j]), ws.fwd_per[j]);
        const auto& out = ws.fwd_per[j].act.back();
        ws.d[j] = out[0];
        ws.s[j] = out[1];
    }
}

}  // namespace

template <typename T>
T compute_batch_gradient(const FieldModel<T>& model, const TrainingSet& set,
                         std::span<const uint32_t> ray_ids, std::vector<T>& grads) {
    if (grads.size() != model.param_count())
        throw ShapeError("compute_batch_gradient: gradient vector size mismatch");
    static thread_local FieldWorkspace<T> ws;
    std::size_t t_max = 0;
    for (uint32_t r : ray_ids) t_max = std::max(t_max, set.raylet_count(r));
    ensure_workspace(ws, model, std::max<std::size_t>(t_max, 1));

    const std::size_t mlp_params = model.mlp.params().size();
    const bool train_table =
        model.feature_mode == FeatureMode::LearnableTable && !model.feature_table.empty();
    const int k = set.layout.k;
    const int posw = set.layout.positional_width();
    const int roww = set.layout.row_width();
    const T inv_batch = T(1) / static_cast<T>(ray_ids.size());

    T total_loss = T(0);
    for (uint32_t ray : ray_ids) {
        std::size_t n = 0;
        fill_ray_inputs(model, set, ray, ws, n);
        std::span<const T> rho(ws.rho.data(), n), d(ws.d.data(), n), s(ws.s.data(), n);
        BlendResult<T> blended = blend(rho, d, s, model.blend_mode);
        T dloss;
        total_loss += loss_l1(blended.value, static_cast<T>(set.ray_gt[ray]), &dloss);
        T dvalue = dloss * inv_batch;
        blend_backward(rho, d, s, model.blend_mode, blended, dvalue,
                       std::span<T>(ws.grad_d.data(), n), std::span<T>(ws.grad_s.data(), n));
        for (std::size_t j = 0; j < n; ++j) {
            const T dout[2] = {ws.grad_d[j], ws.grad_s[j]};
            model.mlp.backward(std::span<const T>(ws.inputs[j]), ws.fwd_per[j],
                               std::span<const T>(dout, 2), grads.data(), ws.bwd,
                               train_table ? ws.dinput.data() : nullptr);
            if (!train_table) continue;
            std::size_t r = set.ray_begin[ray] + j;
            const int* nbrs = set.raylet_neighbors.data() + r * static_cast<std::size_t>(k);
            for (int kk = 0; kk < k; ++kk) {
                const T* src = ws.dinput.data() + 6 + kk * roww + posw;
                T* dst = grads.data() + mlp_params +
                         static_cast<std::size_t>(nbrs[kk]) * set.layout.channels;
                for (int c = 0; c < set.layout.channels; ++c) dst[c] += src[c];
            }
        }
    }
    return total_loss * inv_batch;
}

template <typename T>
T predict_ray(const FieldModel<T>& model, const TrainingSet& set, std::size_t ray) {
    static thread_local FieldWorkspace<T> ws;
    std::size_t n_needed = set.raylet_count(ray);
    ensure_workspace(ws, model, std::max<std::size_t>(n_needed, 1));
    std::size_t n = 0;
    fill_ray_inputs(model, set, ray, ws, n);
    std::span<const T> rho(ws.rho.data(), n), d(ws.d.data(), n), s(ws.s.data(), n);
    return blend(rho, d, s, model.blend_mode).value;
}

template float compute_batch_gradient<float>(const FieldModel<float>&, const TrainingSet&,
                                             std::span<const uint32_t>, std::vector<float>&);
template double compute_batch_gradient<double>(const FieldModel<double>&, const TrainingSet&,
                                               std::span<const uint32_t>, std::vector<double>&);
template float predict_ray<float>(const FieldModel<float>&, const TrainingSet&, std::size_t);
template double predict_ray<double>(const FieldModel<double>&, const TrainingSet&, std::size_t);

TrainResult train(const TrainingSet& set, const TrainConfig& cfg) {
    auto model = FieldModel<float>::make(cfg.layout, cfg.blend_mode, cfg.feature_mode,
                                         set.positions.size(), cfg.hidden, cfg.hidden_layers);
    model.initialize(cfg.seed);

    const std::size_t n_params = model.param_count();
    const std::size_t update_limit =
        model.feature_mode == FeatureMode::LearnableTable ? n_params : model.mlp.params().size();
    std::vector<float> grads(n_params, 0.0f);
    std::vector<float> m(update_limit, 0.0f), v(update_limit, 0.0f);

    std::mt19937_64 rng(cfg.seed + 1);
    std::uniform_int_distribution<std::size_t> pick(0, set.ray_count() - 1);
    std::vector<uint32_t> batch(static_cast<std::size_t>(cfg.batch_rays));

    TrainResult result;
    result.train_rays = set.ray_count();
    double b1t = 1.0, b2t = 1.0;
    for (int step = 0; step < cfg.steps; ++step) {
        for (auto& id : batch) id = static_cast<uint32_t>(pick(rng));
        std::fill(grads.begin(), grads.end(), 0.0f);
        float loss = compute_batch_gradient(model, set, batch, grads);

        double lr = cfg.lr;
        if (cfg.cosine_decay)
            lr *= 0.5 * (1.0 + std::cos(std::numbers::pi * step / std::max(cfg.steps, 1)));
        b1t *= cfg.beta1;
        b2t *= cfg.beta2;
        double corr = lr * std::sqrt(1.0 - b2t) / (1.0 - b1t);
        for (std::size_t i = 0; i < update_limit; ++i) {
            m[i] = static_cast<float>(cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grads[i]);
            v[i] = static_cast<float>(cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i]);
            model.param(i) -= static_cast<float>(corr * m[i] /
                                                 (std::sqrt(static_cast<double>(v[i])) + cfg.adam_eps));
        }
        if (step % 10 == 0 || step + 1 == cfg.steps)
            result.loss_trace.emplace_back(step, static_cast<double>(loss));
    }
    result.model = std::move(model);
    return result;
}

TrainResult train(const SceneGeometry& scene, std::span<const TrainView> views,
                  const TrainConfig& cfg) {
    TrainingSet set = build_training_set(scene, views, cfg);
    return train(set, cfg);
}

}  // namespace rdf
