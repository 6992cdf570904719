#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "rdf/errors.hpp"
#include "rdf/vec.hpp"

namespace rdf {

struct PointCloud {
    std::vector<Vec3> positions;
    // Optional per-point attributes (colors etc.), uniform width.
    std::vector<std::vector<float>> attributes;

    std::size_t size() const { return positions.size(); }
};

// Sigma = R * diag(scale^2) * R^T; throws on non-positive scale.
inline Mat3 build_covariance(const Vec3& scale, const Quat& rotation) {
    if (scale.x <= 0.0 || scale.y <= 0.0 || scale.z <= 0.0)
        throw InvalidParameter("build_covariance: scale components must be positive");
    Mat3 r = rotation.to_rotation();
    Mat3 s2 = Mat3::diag(scale.x * scale.x, scale.y * scale.y, scale.z * scale.z);
    Mat3 cov = r * s2 * r.transposed();
    // Symmetrize away round-off so downstream inverses stay symmetric.
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            double v = 0.5 * (cov(i, j) + cov(j, i));
            cov(i, j) = v;
            cov(j, i) = v;
        }
    return cov;
}

struct Gaussian {
    Vec3 mean;
    Vec3 scale;      // per-axis standard deviations, > 0
    Quat rotation;   // unit
    double opacity = 1.0;

    Mat3 covariance() const { return build_covariance(scale, rotation); }
    Mat3 covariance_inverse() const { return covariance().inverse(); }
};

struct GaussianSet {
    std::vector<Gaussian> gaussians;
    std::vector<std::vector<float>> attributes;

    std::size_t size() const { return gaussians.size(); }
};

using SceneGeometry = std::variant<PointCloud, GaussianSet>;

inline std::size_t scene_size(const SceneGeometry& s) {
    return std::visit([](const auto& g) { return g.size(); }, s);
}

inline Vec3 scene_position(const SceneGeometry& s, std::size_t i) {
    if (const auto* pc = std::get_if<PointCloud>(&s)) return pc->positions[i];
    return std::get<GaussianSet>(s).gaussians[i].mean;
}

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit
};

struct Raylet {
    Vec3 start;          // p_l, on the parent ray
    Vec3 direction;      // u_l = parent ray direction
    double t_start = 0;  // distance from ray origin to start
    int source_index = -1;
};

}  // namespace rdf
