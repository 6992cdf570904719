#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rdf/errors.hpp"
#include "rdf/vec.hpp"

namespace rdf {

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Vec3> normals;  // optional per-vertex normals; empty or size() == vertices.size()

    bool empty() const { return triangles.empty(); }
    void validate() const;

    double triangle_area(std::size_t t) const {
        const auto& tri = triangles[t];
        Vec3 e1 = vertices[static_cast<std::size_t>(tri[1])] - vertices[static_cast<std::size_t>(tri[0])];
        Vec3 e2 = vertices[static_cast<std::size_t>(tri[2])] - vertices[static_cast<std::size_t>(tri[0])];
        return 0.5 * norm(cross(e1, e2));
    }
    Vec3 face_normal(std::size_t t) const {
        const auto& tri = triangles[t];
        Vec3 e1 = vertices[static_cast<std::size_t>(tri[1])] - vertices[static_cast<std::size_t>(tri[0])];
        Vec3 e2 = vertices[static_cast<std::size_t>(tri[2])] - vertices[static_cast<std::size_t>(tri[0])];
        return normalized(cross(e1, e2));
    }
};

struct SurfaceSamples {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;  // unit; interpolated when vertex normals exist
};

// n uniform-by-area samples with normals, seeded and deterministic.
SurfaceSamples sample_mesh_surface(const TriangleMesh& mesh, int n, uint64_t seed);

}  // namespace rdf
