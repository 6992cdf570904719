#include "rdf/render.hpp"

#include <algorithm>
#include <cmath>

namespace rdf {

ModelEvaluator::ModelEvaluator(const FieldModel<float>& model, const PointGrid& grid)
    : model_(&model), grid_(&grid) {}

void ModelEvaluator::evaluate(std::span<const RayletCandidate> candidates, std::vector<float>& d,
                              std::vector<float>& s) const {
    static thread_local std::vector<float> input;
    static thread_local MlpWorkspace<float> ws;
    input.resize(static_cast<std::size_t>(model_->mlp_cfg.in_dim));
    ws.resize(model_->mlp_cfg);
    d.resize(candidates.size());
    s.resize(candidates.size());
    const float* table = model_->feature_table.empty() ? nullptr : model_->feature_table.data();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Raylet& r = candidates[i].raylet;
        auto nbrs = grid_->knn(r.start, model_->layout.k);
        fill_raylet_input<float>(
            r.start, r.direction, nbrs,
            [&](int idx) { return grid_->point(static_cast<std::size_t>(idx)); }, table,
            model_->layout, input.data());
        model_->mlp.forward(std::span<const float>(input), ws);
        d[i] = ws.act.back()[0];
        s[i] = ws.act.back()[1];
    }
}

void OracleEvaluator::evaluate(std::span<const RayletCandidate> candidates, std::vector<float>& d,
                               std::vector<float>& s) const {
    d.resize(candidates.size());
    s.resize(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        auto exact = scene_->exact_raylet_distance(candidates[i].raylet);
        d[i] = exact ? static_cast<float>(*exact) : 1e6f;
        s[i] = 0.0f;
    }
}

SampledDistanceField::SampledDistanceField(const Camera& camera, const RayletSampler& sampler,
                                           const RayletEvaluator& evaluator, BlendMode mode,
                                           int t_test)
    : camera_(&camera), sampler_(&sampler), evaluator_(&evaluator), mode_(mode), t_test_(t_test) {
    if (t_test <= 0) throw InvalidParameter("SampledDistanceField: t_test must be positive");
}

std::optional<double> SampledDistanceField::evaluate(const Ray& ray, double u, double v,
                                                     std::vector<int>* sources) const {
    auto cands = sampler_->candidates(ray, u, v, t_test_);
    if (sources) {
        sources->clear();
        for (const auto& c : cands) sources->push_back(c.source_index);
        std::sort(sources->begin(), sources->end());
    }
    if (cands.empty()) return std::nullopt;
    static thread_local std::vector<float> d, s, rho;
    evaluator_->evaluate(cands, d, s);
    rho.resize(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i)
        rho[i] = static_cast<float>(cands[i].raylet.t_start);
    return static_cast<double>(
        blend<float>(std::span<const float>(rho), std::span<const float>(d),
                     std::span<const float>(s), mode_)
            .value);
}

DepthMap render_distance(const SampledDistanceField& field) {
    const Camera& cam = field.camera();
    DepthMap out(cam.width, cam.height);
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            double u = x + 0.5, v = y + 0.5;
            Ray ray = generate_ray(cam, u, v);
            auto value = field.evaluate(ray, u, v);
            if (value && *value > 0.0)
                out.set(x, y, static_cast<float>(*value));
            else
                out.set_invalid(x, y);
        }
    }
    return out;
}

namespace {

inline Vec3 spherical_dir(double theta, double phi) {
    double st = std::sin(theta);
    return {st * std::cos(phi), std::cos(theta), st * std::sin(phi)};
}

// Evaluates D along the probe direction d(theta, phi) from the camera center;
// the tile bucket is looked up at the base pixel (perturbations are ~0.03 px,
// well inside the one-tile footprint slack).
std::optional<double> probe(const SampledDistanceField& field, const Vec3& origin, double theta,
                            double phi, double u, double v, std::vector<int>* sources) {
    Ray ray{origin, spherical_dir(theta, phi)};
    return field.evaluate(ray, u, v, sources);
}

}  // namespace

NormalStatus analytic_normal(const SampledDistanceField& field, double u, double v, Vec3& normal,
                             double angle_step) {
    const Camera& cam = field.camera();
    Ray ray = generate_ray(cam, u, v);
    const Vec3 d = ray.direction;
    if (std::abs(d.y) > 1.0 - 1e-9) return NormalStatus::Unstable;  // polar singularity
    const double theta = std::acos(std::clamp(d.y, -1.0, 1.0));
    const double phi = std::atan2(d.z, d.x);
    const double h = angle_step;

    std::vector<int> base_sources, probe_sources;
    auto D0 = field.evaluate(ray, u, v, &base_sources);
    if (!D0 || !(*D0 > 0.0)) return NormalStatus::NoDepth;

    double D[4];
    const double dtheta[4] = {h, -h, 0, 0};
    const double dphi[4] = {0, 0, h, -h};
    for (int i = 0; i < 4; ++i) {
        auto Di = probe(field, ray.origin, theta + dtheta[i], phi + dphi[i], u, v, &probe_sources);
        if (!Di) return NormalStatus::Unstable;
        if (probe_sources != base_sources) return NormalStatus::Unstable;
        D[i] = *Di;
    }
    const double D_theta = (D[0] - D[1]) / (2.0 * h);
    const double D_phi = (D[2] - D[3]) / (2.0 * h);

    const double st = std::sin(theta), ct = std::cos(theta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double Dv = *D0;
    // Surface point Phi = D(theta, phi) * d(theta, phi); tangents below.
    Vec3 t_phi{(D_phi * cp - Dv * sp) * st, D_phi * ct, (D_phi * sp + Dv * cp) * st};
    Vec3 t_theta{(D_theta * st + Dv * ct) * cp, D_theta * ct - Dv * st,
                 (D_theta * st + Dv * ct) * sp};
    Vec3 n = cross(t_phi, t_theta);
    double len = norm(n);
    if (!(len > 1e-12) || !std::isfinite(len)) return NormalStatus::Unstable;
    n = n / len;
    if (dot(n, d) > 0.0) n = -1.0 * n;  // face the camera
    normal = n;
    return NormalStatus::Ok;
}

NormalMap render_normals(const SampledDistanceField& field, const DepthMap& depth) {
    const Camera& cam = field.camera();
    NormalMap out(cam.width, cam.height);
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            if (!depth.is_valid(x, y)) {
                out.set_invalid(x, y);
                continue;
            }
            Vec3 n;
            if (analytic_normal(field, x + 0.5, y + 0.5, n) == NormalStatus::Ok)
                out.set(x, y, n);
            else
                out.set_invalid(x, y);
        }
    }
    return out;
}

}  // namespace rdf
