#include "rdf/sampling.hpp"

#include <cstdio>
#include <map>
#include <memory>
#include <tuple>
#include <unordered_set>

namespace rdf {

std::size_t deduplicate_points(PointCloud& cloud) {
    std::map<std::tuple<double, double, double>, int> seen;
    std::vector<Vec3> kept;
    std::vector<std::vector<float>> kept_attrs;
    kept.reserve(cloud.positions.size());
    for (std::size_t i = 0; i < cloud.positions.size(); ++i) {
        const Vec3& p = cloud.positions[i];
        auto [it, inserted] = seen.emplace(std::make_tuple(p.x, p.y, p.z), 1);
        if (!inserted) continue;
        kept.push_back(p);
        if (!cloud.attributes.empty()) kept_attrs.push_back(cloud.attributes[i]);
    }
    std::size_t dropped = cloud.positions.size() - kept.size();
    if (dropped > 0) {
        std::fprintf(stderr, "warning: dropped %zu duplicate point(s) before radius computation\n",
                     dropped);
        cloud.positions = std::move(kept);
        cloud.attributes = std::move(kept_attrs);
    }
    return dropped;
}

VirtualBallSet compute_ball_radii(const PointCloud& cloud) {
    if (cloud.size() < 2) throw DegenerateInput("compute_ball_radii: need at least 2 points");
    PointGrid grid(cloud.positions);
    VirtualBallSet out;
    out.centers = cloud.positions;
    out.radii.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        double r = grid.nearest_distance(static_cast<int>(i));
        if (r <= 0.0)
            throw DegenerateInput("compute_ball_radii: duplicate points give zero radius");
        out.radii[i] = r;
    }
    return out;
}

VirtualBallSet compute_ball_radii_brute(const PointCloud& cloud) {
    if (cloud.size() < 2) throw DegenerateInput("compute_ball_radii: need at least 2 points");
    VirtualBallSet out;
    out.centers = cloud.positions;
    out.radii.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < cloud.size(); ++j) {
            if (i == j) continue;
            best = std::min(best, dist2(cloud.positions[i], cloud.positions[j]));
        }
        if (best <= 0.0)
            throw DegenerateInput("compute_ball_radii: duplicate points give zero radius");
        out.radii[i] = std::sqrt(best);
    }
    return out;
}

double ray_gaussian_t(const Ray& ray, const Mat3& cov_inv, const Vec3& mean) {
    Vec3 num_v = cov_inv * (mean - ray.origin);
    double num = dot(ray.direction, num_v);
    double den = dot(ray.direction, cov_inv * ray.direction);
    if (!(den > 0.0) || !std::isfinite(den))
        throw DegenerateInput("ray_gaussian_t: numerically singular covariance");
    return num / den;
}

double ray_gaussian_t(const Ray& ray, const Gaussian& g) {
    Mat3 cov = g.covariance();
    // Cheap conditioning guard: scale ratio stands in for the eigen ratio.
    double smax = std::max({g.scale.x, g.scale.y, g.scale.z});
    double smin = std::min({g.scale.x, g.scale.y, g.scale.z});
    if ((smax * smax) / (smin * smin) > 1e12)
        throw DegenerateInput("ray_gaussian_t: covariance condition number exceeds 1e12");
    return ray_gaussian_t(ray, cov.inverse(), g.mean);
}

double gaussian_value(const Gaussian& g, const Mat3& cov_inv, const Vec3& x) {
    Vec3 d = x - g.mean;
    double q = dot(d, cov_inv * d);
    return std::exp(-0.5 * q);
}

GaussianSceneCache::GaussianSceneCache(const GaussianSet& set) {
    cov_inv.reserve(set.size());
    bound_radius.reserve(set.size());
    for (const Gaussian& g : set.gaussians) {
        cov_inv.push_back(g.covariance().inverse());
        // alpha >= 1/255 requires a Mahalanobis distance below
        // sqrt(2 ln 255) ~= 3.33; 3.4 max-scale radii bound that in Euclidean
        // terms with margin, so tile culling can never drop an accepted hit.
        double smax = std::max({g.scale.x, g.scale.y, g.scale.z});
        bound_radius.push_back(3.4 * smax);
    }
}

std::vector<RayletCandidate> ray_ball_feet_subset(const Ray& ray, const VirtualBallSet& balls,
                                                  std::span<const int> subset, int T) {
    if (T < 1) throw InvalidParameter("ray_ball_feet: T must be >= 1");
    std::vector<RayletCandidate> hits;
    RayletCandidate c;
    for (int i : subset)
        if (detail::ball_candidate(ray, balls.centers[static_cast<std::size_t>(i)],
                                   balls.radii[static_cast<std::size_t>(i)], i, c))
            hits.push_back(c);
    if (static_cast<int>(hits.size()) > T) {
        std::nth_element(hits.begin(), hits.begin() + T, hits.end(), detail::candidate_less_ball);
        hits.resize(static_cast<std::size_t>(T));
    }
    std::sort(hits.begin(), hits.end(), detail::candidate_less_ball);
    return hits;
}

std::vector<RayletCandidate> ray_ball_feet(const Ray& ray, const VirtualBallSet& balls, int T) {
    std::vector<int> all(balls.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return ray_ball_feet_subset(ray, balls, all, T);
}

std::vector<RayletCandidate> gaussian_top_contributions_subset(const Ray& ray, const GaussianSet& set,
                                                               const GaussianSceneCache& cache,
                                                               std::span<const int> subset, int T) {
    if (T < 1) throw InvalidParameter("gaussian_top_contributions: T must be >= 1");
    std::vector<detail::GaussianHit> hits;
    for (int i : subset) {
        const Gaussian& g = set.gaussians[static_cast<std::size_t>(i)];
        const Mat3& ci = cache.cov_inv[static_cast<std::size_t>(i)];
        double t = ray_gaussian_t(ray, ci, g.mean);
        if (t <= 0.0) continue;
        Vec3 x = ray.origin + t * ray.direction;
        double alpha = std::min(kAlphaClamp, g.opacity * gaussian_value(g, ci, x));
        if (alpha < kAlphaSkipThreshold) continue;
        hits.push_back({t, alpha, x, i});
    }
    // Front-to-back transmittance weights over every accepted hit.
    std::sort(hits.begin(), hits.end(), [](const detail::GaussianHit& a, const detail::GaussianHit& b) {
        return a.t != b.t ? a.t < b.t : a.index < b.index;
    });
    std::vector<RayletCandidate> cands;
    cands.reserve(hits.size());
    double transmittance = 1.0;
    for (const detail::GaussianHit& h : hits) {
        double w = h.alpha * transmittance;
        transmittance *= (1.0 - h.alpha);
        RayletCandidate c;
        c.raylet = {h.point, ray.direction, h.t, h.index};
        c.rank_key = w;
        c.source_index = h.index;
        cands.push_back(c);
    }
    auto by_weight = [](const RayletCandidate& a, const RayletCandidate& b) {
        if (a.rank_key != b.rank_key) return a.rank_key > b.rank_key;
        if (a.raylet.t_start != b.raylet.t_start) return a.raylet.t_start < b.raylet.t_start;
        return a.source_index < b.source_index;
    };
    if (static_cast<int>(cands.size()) > T) {
        std::nth_element(cands.begin(), cands.begin() + T, cands.end(), by_weight);
        cands.resize(static_cast<std::size_t>(T));
    }
    std::sort(cands.begin(), cands.end(), by_weight);
    return cands;
}

std::vector<RayletCandidate> gaussian_top_contributions(const Ray& ray, const GaussianSet& set,
                                                        const GaussianSceneCache& cache, int T) {
    std::vector<int> all(set.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return gaussian_top_contributions_subset(ray, set, cache, all, T);
}

TileIndex::TileIndex(const Camera& camera, const VirtualBallSet& balls, int tile_px)
    : tile_px_(tile_px) {
    if (tile_px < 1) throw InvalidParameter("TileIndex: tile_px must be >= 1");
    tiles_x_ = (camera.width + tile_px - 1) / tile_px;
    tiles_y_ = (camera.height + tile_px - 1) / tile_px;
    buckets_.assign(static_cast<std::size_t>(tiles_x_ * tiles_y_), {});
    for (std::size_t i = 0; i < balls.size(); ++i)
        insert_sphere(camera, balls.centers[i], balls.radii[i], static_cast<int>(i));
    finalize();
}

TileIndex::TileIndex(const Camera& camera, const GaussianSet& set, const GaussianSceneCache& cache,
                     int tile_px)
    : tile_px_(tile_px) {
    if (tile_px < 1) throw InvalidParameter("TileIndex: tile_px must be >= 1");
    tiles_x_ = (camera.width + tile_px - 1) / tile_px;
    tiles_y_ = (camera.height + tile_px - 1) / tile_px;
    buckets_.assign(static_cast<std::size_t>(tiles_x_ * tiles_y_), {});
    for (std::size_t i = 0; i < set.size(); ++i)
        insert_sphere(camera, set.gaussians[i].mean, cache.bound_radius[i], static_cast<int>(i));
    finalize();
}

void TileIndex::insert_sphere(const Camera& camera, const Vec3& center, double radius, int index) {
    // Conservative bound: the sphere's silhouette is contained in the
    // projection of its enclosing cube, which is the hull of the projected
    // corners as long as the cube is fully in front of the camera.
    double umin = std::numeric_limits<double>::infinity(), umax = -umin;
    double vmin = umin, vmax = -umin;
    bool any_behind = false, all_behind = true;
    for (int corner = 0; corner < 8; ++corner) {
        Vec3 p = center + Vec3{(corner & 1) ? radius : -radius, (corner & 2) ? radius : -radius,
                               (corner & 4) ? radius : -radius};
        double u, v, z;
        bool front = project_point(camera, p, u, v, z);
        if (!front || z < 1e-9) {
            any_behind = true;
            if (z > 0.0) all_behind = false;
            continue;
        }
        all_behind = false;
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (all_behind) return;  // culled: no forward pixel ray can accept it
    int tx0 = 0, tx1 = tiles_x_ - 1, ty0 = 0, ty1 = tiles_y_ - 1;
    if (!any_behind) {
        tx0 = std::clamp(static_cast<int>(std::floor(umin / tile_px_)), 0, tiles_x_ - 1);
        tx1 = std::clamp(static_cast<int>(std::floor(umax / tile_px_)), 0, tiles_x_ - 1);
        ty0 = std::clamp(static_cast<int>(std::floor(vmin / tile_px_)), 0, tiles_y_ - 1);
        ty1 = std::clamp(static_cast<int>(std::floor(vmax / tile_px_)), 0, tiles_y_ - 1);
        if (umax < 0.0 || umin >= tiles_x_ * static_cast<double>(tile_px_) || vmax < 0.0 ||
            vmin >= tiles_y_ * static_cast<double>(tile_px_))
            return;  // bound misses the image entirely
    }
    for (int ty = ty0; ty <= ty1; ++ty)
        for (int tx = tx0; tx <= tx1; ++tx)
            buckets_[static_cast<std::size_t>(ty * tiles_x_ + tx)].push_back(index);
}

void TileIndex::finalize() {
    for (auto& b : buckets_) {
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        b.shrink_to_fit();
    }
}

std::span<const int> TileIndex::bucket_for_pixel(double u, double v) const {
    int tx = std::clamp(static_cast<int>(std::floor(u / tile_px_)), 0, tiles_x_ - 1);
    int ty = std::clamp(static_cast<int>(std::floor(v / tile_px_)), 0, tiles_y_ - 1);
    return buckets_[static_cast<std::size_t>(ty * tiles_x_ + tx)];
}

RayletSampler::RayletSampler(const Camera& camera, const VirtualBallSet& balls, int tile_px)
    : balls_(&balls), index_(camera, balls, tile_px) {}

RayletSampler::RayletSampler(const Camera& camera, const GaussianSet& set, int tile_px)
    : gaussians_(&set),
      cache_(std::make_unique<GaussianSceneCache>(set)),
      index_(camera, set, *cache_, tile_px) {}

std::vector<RayletCandidate> RayletSampler::candidates(const Ray& ray, double u, double v,
                                                       int T) const {
    std::span<const int> bucket = index_.bucket_for_pixel(u, v);
    if (balls_) return ray_ball_feet_subset(ray, *balls_, bucket, T);
    return gaussian_top_contributions_subset(ray, *gaussians_, *cache_, bucket, T);
}

}  // namespace rdf
