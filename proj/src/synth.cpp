#include "rdf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rdf/grid_knn.hpp"

namespace rdf {

namespace {

constexpr double kHitEps = 1e-12;

std::optional<double> hit_plane(const PlanePrimitive& p, const Ray& ray) {
    double denom = dot(ray.direction, p.normal);
    if (std::abs(denom) < 1e-15) return std::nullopt;
    double t = dot(p.point - ray.origin, p.normal) / denom;
    if (t <= kHitEps) return std::nullopt;
    return t;
}

std::optional<double> hit_sphere(const SpherePrimitive& s, const Ray& ray) {
    Vec3 oc = ray.origin - s.center;
    double b = dot(oc, ray.direction);
    double c = norm2(oc) - s.radius * s.radius;
    double disc = b * b - c;
    if (disc < 0.0) return std::nullopt;
    double sq = std::sqrt(disc);
    double t0 = -b - sq, t1 = -b + sq;
    if (t0 > kHitEps) return t0;
    if (t1 > kHitEps) return t1;
    return std::nullopt;
}

std::optional<double> hit_box(const BoxInteriorPrimitive& box, const Ray& ray) {
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
        double o = ray.origin[axis], d = ray.direction[axis];
        double lo = axis == 0 ? box.min.x : (axis == 1 ? box.min.y : box.min.z);
        double hi = axis == 0 ? box.max.x : (axis == 1 ? box.max.y : box.max.z);
        if (std::abs(d) < 1e-15) {
            if (o < lo || o > hi) return std::nullopt;
            continue;
        }
        double t0 = (lo - o) / d, t1 = (hi - o) / d;
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
    }
    if (tmax < std::max(tmin, 0.0)) return std::nullopt;
    if (tmin > kHitEps) return tmin;  // entering from outside
    if (tmax > kHitEps) return tmax;  // inside: hit the wall on the way out
    return std::nullopt;
}

double box_face_residual(const BoxInteriorPrimitive& box, const Vec3& p, Vec3& normal) {
    // Distance to the nearest face plane and that face's inward normal.
    double best = std::numeric_limits<double>::infinity();
    struct Face {
        double dist;
        Vec3 n;
    };
    const Face faces[6] = {
        {std::abs(p.x - box.min.x), {1, 0, 0}},  {std::abs(p.x - box.max.x), {-1, 0, 0}},
        {std::abs(p.y - box.min.y), {0, 1, 0}},  {std::abs(p.y - box.max.y), {0, -1, 0}},
        {std::abs(p.z - box.min.z), {0, 0, 1}},  {std::abs(p.z - box.max.z), {0, 0, -1}},
    };
    for (const Face& f : faces)
        if (f.dist < best) {
            best = f.dist;
            normal = f.n;
        }
    return best;
}

struct Basis {
    Vec3 u, v;
};

Basis plane_basis(const Vec3& n) {
    Vec3 helper = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 u = normalized(cross(helper, n));
    return {u, cross(n, u)};
}

double primitive_area(const Primitive& prim) {
    if (const auto* p = std::get_if<PlanePrimitive>(&prim)) return 4.0 * p->half_u * p->half_v;
    if (const auto* s = std::get_if<SpherePrimitive>(&prim))
        return 4.0 * std::numbers::pi * s->radius * s->radius;
    const auto& b = std::get<BoxInteriorPrimitive>(prim);
    Vec3 e = b.max - b.min;
    return 2.0 * (e.x * e.y + e.y * e.z + e.x * e.z);
}

Vec3 sample_primitive(const Primitive& prim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (const auto* p = std::get_if<PlanePrimitive>(&prim)) {
        Basis b = plane_basis(p->normal);
        double a = (unit(rng) * 2.0 - 1.0) * p->half_u;
        double c = (unit(rng) * 2.0 - 1.0) * p->half_v;
        return p->point + b.u * a + b.v * c;
    }
    if (const auto* s = std::get_if<SpherePrimitive>(&prim)) {
        double z = unit(rng) * 2.0 - 1.0;
        double phi = unit(rng) * 2.0 * std::numbers::pi;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return s->center + Vec3{r * std::cos(phi), r * std::sin(phi), z} * s->radius;
    }
    const auto& box = std::get<BoxInteriorPrimitive>(prim);
    Vec3 e = box.max - box.min;
    double areas[6] = {e.y * e.z, e.y * e.z, e.x * e.z, e.x * e.z, e.x * e.y, e.x * e.y};
    double total = 0;
    for (double a : areas) total += a;
    double pick = unit(rng) * total;
    int face = 0;
    for (; face < 5; ++face) {
        if (pick < areas[face]) break;
        pick -= areas[face];
    }
    double a = unit(rng), b = unit(rng);
    switch (face) {
        case 0: return {box.min.x, box.min.y + a * e.y, box.min.z + b * e.z};
        case 1: return {box.max.x, box.min.y + a * e.y, box.min.z + b * e.z};
        case 2: return {box.min.x + a * e.x, box.min.y, box.min.z + b * e.z};
        case 3: return {box.min.x + a * e.x, box.max.y, box.min.z + b * e.z};
        case 4: return {box.min.x + a * e.x, box.min.y + b * e.y, box.min.z};
        default: return {box.min.x + a * e.x, box.min.y + b * e.y, box.max.z};
    }
}

}  // namespace

AnalyticScene AnalyticScene::plane(const Vec3& point, const Vec3& normal, double half_u,
                                   double half_v) {
    AnalyticScene s;
    s.primitives.push_back(PlanePrimitive{point, normalized(normal), half_u, half_v});
    return s;
}

AnalyticScene AnalyticScene::sphere(const Vec3& center, double radius) {
    AnalyticScene s;
    s.primitives.push_back(SpherePrimitive{center, radius});
    return s;
}

AnalyticScene AnalyticScene::box_interior(const Vec3& min, const Vec3& max) {
    AnalyticScene s;
    s.primitives.push_back(BoxInteriorPrimitive{min, max});
    return s;
}

AnalyticScene AnalyticScene::sphere_in_box(const Vec3& center, double radius, const Vec3& box_min,
                                           const Vec3& box_max) {
    AnalyticScene s;
    s.primitives.push_back(SpherePrimitive{center, radius});
    s.primitives.push_back(BoxInteriorPrimitive{box_min, box_max});
    return s;
}

std::optional<double> AnalyticScene::exact_ray_distance(const Ray& ray) const {
    std::optional<double> best;
    for (const Primitive& prim : primitives) {
        std::optional<double> t = std::visit(
            [&](const auto& p) -> std::optional<double> {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, PlanePrimitive>) return hit_plane(p, ray);
                else if constexpr (std::is_same_v<P, SpherePrimitive>) return hit_sphere(p, ray);
                else return hit_box(p, ray);
            },
            prim);
        if (t && (!best || *t < *best)) best = t;
    }
    return best;
}

std::optional<double> AnalyticScene::exact_raylet_distance(const Raylet& raylet) const {
    Ray parent{raylet.start - raylet.direction * raylet.t_start, raylet.direction};
    std::optional<double> hit = exact_ray_distance(parent);
    if (!hit) return std::nullopt;
    return *hit - raylet.t_start;
}

Vec3 AnalyticScene::surface_normal(const Vec3& p) const {
    double best = std::numeric_limits<double>::infinity();
    Vec3 normal{0, 0, 1};
    for (const Primitive& prim : primitives) {
        double residual;
        Vec3 n;
        if (const auto* pl = std::get_if<PlanePrimitive>(&prim)) {
            residual = std::abs(dot(p - pl->point, pl->normal));
            n = pl->normal;
        } else if (const auto* sp = std::get_if<SpherePrimitive>(&prim)) {
            double r = norm(p - sp->center);
            residual = std::abs(r - sp->radius);
            n = r > 0 ? (p - sp->center) / r : Vec3{0, 0, 1};
        } else {
            residual = box_face_residual(std::get<BoxInteriorPrimitive>(prim), p, n);
        }
        if (residual < best) {
            best = residual;
            normal = n;
        }
    }
    return normal;
}

Vec3 AnalyticScene::centroid() const {
    Vec3 acc;
    double total_area = 0;
    for (const Primitive& prim : primitives) {
        double area = primitive_area(prim);
        Vec3 c = std::visit(
            [](const auto& p) -> Vec3 {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, PlanePrimitive>) return p.point;
                else if constexpr (std::is_same_v<P, SpherePrimitive>) return p.center;
                else return (p.min + p.max) * 0.5;
            },
            prim);
        acc += c * area;
        total_area += area;
    }
    return total_area > 0 ? acc / total_area : acc;
}

PointCloud sample_points(const AnalyticScene& scene, int n, uint64_t seed) {
    if (n < 2) throw InvalidParameter("sample_points: need n >= 2");
    std::mt19937_64 rng(seed);
    std::vector<double> cdf;
    double total = 0;
    for (const Primitive& prim : scene.primitives) {
        total += primitive_area(prim);
        cdf.push_back(total);
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PointCloud cloud;
    cloud.positions.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double pick = unit(rng) * total;
        std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), pick) - cdf.begin());
        idx = std::min(idx, scene.primitives.size() - 1);
        cloud.positions.push_back(sample_primitive(scene.primitives[idx], rng));
    }
    return cloud;
}

GaussianSet make_gaussians(const AnalyticScene& scene, int n, uint64_t seed) {
    PointCloud cloud = sample_points(scene, n, seed);
    PointGrid grid(cloud.positions);
    GaussianSet set;
    set.gaussians.reserve(cloud.positions.size());
    for (std::size_t i = 0; i < cloud.positions.size(); ++i) {
        double s = grid.nearest_distance(static_cast<int>(i)) * 0.5;
        s = std::max(s, 1e-9);
        Gaussian g;
        g.mean = cloud.positions[i];
        g.scale = {s, s, s};
        g.rotation = Quat{};
        g.opacity = 0.9;
        set.gaussians.push_back(g);
    }
    return set;
}

std::vector<Camera> orbit_cameras(const AnalyticScene& scene, int count, double radius, int width,
                                  int height, double fov_deg, double elevation) {
    if (count < 1) throw InvalidParameter("orbit_cameras: count must be >= 1");
    Vec3 target = scene.centroid();
    std::vector<Camera> cams;
    cams.reserve(static_cast<std::size_t>(count));
    double f = (width / 2.0) / std::tan(fov_deg * std::numbers::pi / 360.0);
    for (int i = 0; i < count; ++i) {
        double azimuth = 2.0 * std::numbers::pi * i / count;
        Vec3 offset = normalized(Vec3{std::cos(azimuth), elevation, std::sin(azimuth)}) * radius;
        Vec3 pos = target + offset;
        Vec3 forward = normalized(target - pos);
        Vec3 up{0, 1, 0};
        if (std::abs(dot(forward, up)) > 0.99) up = {1, 0, 0};
        Vec3 right = normalized(cross(up, forward));
        Vec3 down = cross(forward, right);
        Camera cam;
        cam.fx = f;
        cam.fy = f;
        cam.cx = width / 2.0;
        cam.cy = height / 2.0;
        cam.width = width;
        cam.height = height;
        cam.rotation.m = {right.x, down.x, forward.x, right.y, down.y, forward.y,
                          right.z, down.z, forward.z};
        cam.translation = pos;
        cams.push_back(cam);
    }
    return cams;
}

DepthMap render_oracle_view(const AnalyticScene& scene, const Camera& camera) {
    DepthMap map(camera.width, camera.height);
    for (int y = 0; y < camera.height; ++y)
        for (int x = 0; x < camera.width; ++x) {
            Ray ray = generate_ray(camera, x + 0.5, y + 0.5);
            if (auto t = scene.exact_ray_distance(ray))
                map.set(x, y, static_cast<float>(*t));
        }
    return map;
}

std::vector<DepthMap> render_oracle_views(const AnalyticScene& scene,
                                          std::span<const Camera> cameras) {
    std::vector<DepthMap> maps;
    maps.reserve(cameras.size());
    for (const Camera& cam : cameras) maps.push_back(render_oracle_view(scene, cam));
    return maps;
}

}  // namespace rdf
