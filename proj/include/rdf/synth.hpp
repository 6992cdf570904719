#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rdf/camera.hpp"
#include "rdf/depthmap.hpp"
#include "rdf/scene.hpp"

namespace rdf {

struct PlanePrimitive {
    Vec3 point;
    Vec3 normal;  // unit
    // Optional in-plane half extents for sampling/patch scenes (0 = infinite
    // plane for intersection, but sampling requires finite extents).
    double half_u = 1.0, half_v = 1.0;
};

struct SpherePrimitive {
    Vec3 center;
    double radius = 1.0;
};

// Axis-aligned box interior: cameras inside see the walls (indoor analog).
struct BoxInteriorPrimitive {
    Vec3 min, max;
};

using Primitive = std::variant<PlanePrimitive, SpherePrimitive, BoxInteriorPrimitive>;

// Exact closed-form scene: first-hit ray distance and surface normals to f64
// precision; the ground-truth factory behind every oracle test.
struct AnalyticScene {
    std::vector<Primitive> primitives;

    static AnalyticScene plane(const Vec3& point, const Vec3& normal, double half_u = 1.0,
                               double half_v = 1.0);
    static AnalyticScene sphere(const Vec3& center, double radius);
    static AnalyticScene box_interior(const Vec3& min, const Vec3& max);
    static AnalyticScene sphere_in_box(const Vec3& center, double radius, const Vec3& box_min,
                                       const Vec3& box_max);

    // Smallest positive hit over all primitives; nullopt on miss.
    std::optional<double> exact_ray_distance(const Ray& ray) const;
    // Signed distance from a raylet start to the first hit of its parent ray
    // (negative when the hit lies behind the start).
    std::optional<double> exact_raylet_distance(const Raylet& raylet) const;
    // Outward surface normal at a point assumed on (or near) a primitive.
    Vec3 surface_normal(const Vec3& p) const;
    Vec3 centroid() const;
};

// Uniform-by-area surface samples, seeded.
PointCloud sample_points(const AnalyticScene& scene, int n, uint64_t seed);
// Isotropic Gaussians at sampled points, scale = local NN distance / 2,
// opacity 0.9.
GaussianSet make_gaussians(const AnalyticScene& scene, int n, uint64_t seed);

// Cameras on an orbit around the scene centroid (or ring inside a box
// interior), looking at the centroid.
std::vector<Camera> orbit_cameras(const AnalyticScene& scene, int count, double radius, int width,
                                  int height, double fov_deg = 60.0, double elevation = 0.35);

DepthMap render_oracle_view(const AnalyticScene& scene, const Camera& camera);
std::vector<DepthMap> render_oracle_views(const AnalyticScene& scene,
                                          std::span<const Camera> cameras);

}  // namespace rdf
