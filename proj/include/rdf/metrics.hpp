#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rdf/errors.hpp"
#include "rdf/mesh.hpp"

namespace rdf {

struct RayMetrics {
    double ade = 0, rmse = 0, abs_rel = 0, sq_rel = 0, delta = 0;
    std::size_t n_samples = 0;
};

// Five ray-surface distance metrics; delta counts max(pred/gt, gt/pred)
// strictly below delta_thresh. gt must be positive; callers drop invalid
// pairs beforehand.
RayMetrics ray_metrics(std::span<const double> pred, std::span<const double> gt,
                       double delta_thresh = 1.25);

double median(std::span<const double> values);
// Mean absolute deviation from the median.
double median_abs_spread(std::span<const double> values);

// Shifts and scales pred so its median and spread match gt's.
std::vector<double> scale_align(std::span<const double> pred, std::span<const double> gt);

struct MeshMetrics {
    double accuracy = 0, completion = 0, chamfer_l1 = 0;
    double normal_accuracy = 0, normal_completion = 0, normal_consistency = 0;
    double precision = 0, recall = 0, f1 = 0;
    double threshold = 0.05;
};

// Nine sample-based mesh metrics: n_samples seeded area-uniform samples per
// mesh, exact nearest-neighbor correspondences, unsigned normal dot products.
MeshMetrics mesh_metrics(const TriangleMesh& pred, const TriangleMesh& gt,
                         int n_samples = 100000, double threshold = 0.05, uint64_t seed = 0);

// Same metrics on pre-sampled point sets (used when the ground truth is an
// analytic surface sampling rather than a mesh).
MeshMetrics sample_metrics(const SurfaceSamples& pred, const SurfaceSamples& gt,
                           double threshold = 0.05);

}  // namespace rdf
