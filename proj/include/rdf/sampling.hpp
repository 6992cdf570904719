#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "rdf/camera.hpp"
#include "rdf/errors.hpp"
#include "rdf/grid_knn.hpp"
#include "rdf/scene.hpp"

namespace rdf {

struct VirtualBallSet {
    std::vector<Vec3> centers;
    std::vector<double> radii;  // exact nearest-neighbor distance per point

    std::size_t size() const { return centers.size(); }
};

struct RayletCandidate {
    Raylet raylet;
    double rank_key = 0.0;  // perpendicular distance (balls) or blend weight (gaussians)
    int source_index = -1;
};

// Removes exact duplicate positions, keeping the first occurrence. Returns
// the number of points dropped.
std::size_t deduplicate_points(PointCloud& cloud);

// Radius per point = exact nearest-neighbor distance (grid-accelerated,
// bitwise equal to the O(N^2) scan). Throws on N < 2 or zero distances.
VirtualBallSet compute_ball_radii(const PointCloud& cloud);
VirtualBallSet compute_ball_radii_brute(const PointCloud& cloud);  // test oracle

namespace detail {

// Shared per-primitive candidate tests so the brute and tile routes produce
// bit-identical results on the same primitive subsets.

inline bool ball_candidate(const Ray& ray, const Vec3& center, double radius, int index,
                           RayletCandidate& out) {
    Vec3 rel = center - ray.origin;
    double t_f = dot(rel, ray.direction);
    if (t_f <= 0.0) return false;
    Vec3 foot = ray.origin + t_f * ray.direction;
    double perp = norm(center - foot);
    if (perp > radius) return false;
    out.raylet = {foot, ray.direction, t_f, index};
    out.rank_key = perp;
    out.source_index = index;
    return true;
}

inline bool candidate_less_ball(const RayletCandidate& a, const RayletCandidate& b) {
    if (a.rank_key != b.rank_key) return a.rank_key < b.rank_key;
    if (a.raylet.t_start != b.raylet.t_start) return a.raylet.t_start < b.raylet.t_start;
    return a.source_index < b.source_index;
}

struct GaussianHit {
    double t = 0.0;
    double alpha = 0.0;
    Vec3 point;
    int index = -1;
};

}  // namespace detail

// Closed-form ray parameter maximizing the Gaussian density along the ray.
double ray_gaussian_t(const Ray& ray, const Mat3& cov_inv, const Vec3& mean);
double ray_gaussian_t(const Ray& ray, const Gaussian& g);

// Gaussian density (peak-normalized) at point x.
double gaussian_value(const Gaussian& g, const Mat3& cov_inv, const Vec3& x);

// Precomputed per-Gaussian state reused across rays.
struct GaussianSceneCache {
    std::vector<Mat3> cov_inv;
    std::vector<double> bound_radius;  // conservative: alpha >= 1/255 only inside
    explicit GaussianSceneCache(const GaussianSet& set);
};

constexpr double kAlphaSkipThreshold = 1.0 / 255.0;
constexpr double kAlphaClamp = 0.99;

// Top-T candidates for a ray over an explicit primitive index subset.
// The full-scene brute force passes the identity subset.
std::vector<RayletCandidate> ray_ball_feet_subset(const Ray& ray, const VirtualBallSet& balls,
                                                  std::span<const int> subset, int T);
std::vector<RayletCandidate> gaussian_top_contributions_subset(const Ray& ray, const GaussianSet& set,
                                                               const GaussianSceneCache& cache,
                                                               std::span<const int> subset, int T);

std::vector<RayletCandidate> ray_ball_feet(const Ray& ray, const VirtualBallSet& balls, int T);
std::vector<RayletCandidate> gaussian_top_contributions(const Ray& ray, const GaussianSet& set,
                                                        const GaussianSceneCache& cache, int T);

// Screen-space tile binning of primitive footprints, 3DGS-style. Buckets may
// over-approximate; they must never miss a primitive that a pixel ray of the
// camera could accept.
class TileIndex {
public:
    TileIndex(const Camera& camera, const VirtualBallSet& balls, int tile_px = 16);
    TileIndex(const Camera& camera, const GaussianSet& set, const GaussianSceneCache& cache,
              int tile_px = 16);

    std::span<const int> bucket_for_pixel(double u, double v) const;
    int tile_px() const { return tile_px_; }
    std::size_t tile_count() const { return buckets_.size(); }
    const std::vector<int>& bucket(std::size_t tile) const { return buckets_[tile]; }

private:
    void insert_sphere(const Camera& camera, const Vec3& center, double radius, int index);
    void finalize();

    int tiles_x_ = 0, tiles_y_ = 0, tile_px_ = 16;
    std::vector<std::vector<int>> buckets_;
};

// Full per-scene sampler: owns the acceleration state and answers per-pixel
// candidate queries for one camera.
class RayletSampler {
public:
    RayletSampler(const Camera& camera, const VirtualBallSet& balls, int tile_px = 16);
    RayletSampler(const Camera& camera, const GaussianSet& set, int tile_px = 16);

    std::vector<RayletCandidate> candidates(const Ray& ray, double u, double v, int T) const;

private:
    const VirtualBallSet* balls_ = nullptr;
    const GaussianSet* gaussians_ = nullptr;
    std::unique_ptr<GaussianSceneCache> cache_;
    TileIndex index_;
};

}  // namespace rdf
