#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rdf/blend.hpp"
#include "rdf/camera.hpp"
#include "rdf/depthmap.hpp"
#include "rdf/field.hpp"
#include "rdf/sampling.hpp"
#include "rdf/synth.hpp"

namespace rdf {

// Produces per-candidate (d, s) predictions for the raylets of one ray.
class RayletEvaluator {
public:
    virtual ~RayletEvaluator() = default;
    virtual void evaluate(std::span<const RayletCandidate> candidates, std::vector<float>& d,
                          std::vector<float>& s) const = 0;
};

// Trained-field evaluator; holds the shared KNN grid over scene positions.
class ModelEvaluator : public RayletEvaluator {
public:
    ModelEvaluator(const FieldModel<float>& model, const PointGrid& grid);
    void evaluate(std::span<const RayletCandidate> candidates, std::vector<float>& d,
                  std::vector<float>& s) const override;

private:
    const FieldModel<float>* model_;
    const PointGrid* grid_;
};

// Exact-distance stub: d = signed distance from the raylet start to the
// first analytic hit along the parent ray, s = 0. Candidates whose parent
// ray misses everything get a large positive d (they never arise in oracle
// closure tests where candidates exist only near surfaces).
class OracleEvaluator : public RayletEvaluator {
public:
    explicit OracleEvaluator(const AnalyticScene& scene) : scene_(&scene) {}
    void evaluate(std::span<const RayletCandidate> candidates, std::vector<float>& d,
                  std::vector<float>& s) const override;

private:
    const AnalyticScene* scene_;
};

// The composed per-ray distance field: sampling + field + blender.
class SampledDistanceField {
public:
    SampledDistanceField(const Camera& camera, const RayletSampler& sampler,
                         const RayletEvaluator& evaluator, BlendMode mode, int t_test);

    // Blended D for a ray through (approximately) pixel (u, v); nullopt when
    // no candidates. `sources` receives the candidate source indices.
    std::optional<double> evaluate(const Ray& ray, double u, double v,
                                   std::vector<int>* sources = nullptr) const;
    const Camera& camera() const { return *camera_; }

private:
    const Camera* camera_;
    const RayletSampler* sampler_;
    const RayletEvaluator* evaluator_;
    BlendMode mode_;
    int t_test_;
};

DepthMap render_distance(const SampledDistanceField& field);

enum class NormalStatus { Ok, NoDepth, Unstable };

// Derived surface normal at one pixel via the spherical-frame cross product;
// D-derivatives are central differences of the full pipeline (angular step
// 1e-4 rad) with a candidate-set stability check across the probes.
NormalStatus analytic_normal(const SampledDistanceField& field, double u, double v, Vec3& normal,
                             double angle_step = 1e-4);

NormalMap render_normals(const SampledDistanceField& field, const DepthMap& depth);

}  // namespace rdf
