#include "rdf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rdf {

void TriangleMesh::validate() const {
    const int n = static_cast<int>(vertices.size());
    for (const auto& tri : triangles)
        for (int idx : tri)
            if (idx < 0 || idx >= n) throw ShapeError("TriangleMesh: vertex index out of range");
    if (!normals.empty() && normals.size() != vertices.size())
        throw ShapeError("TriangleMesh: normal count must match vertex count");
}

SurfaceSamples sample_mesh_surface(const TriangleMesh& mesh, int n, uint64_t seed) {
    if (mesh.empty()) throw DegenerateInput("sample_mesh_surface: empty mesh");
    if (n < 1) throw InvalidParameter("sample_mesh_surface: n must be >= 1");
    mesh.validate();

    std::vector<double> cdf;
    cdf.reserve(mesh.triangles.size());
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        total += mesh.triangle_area(t);
        cdf.push_back(total);
    }
    if (!(total > 0.0)) throw DegenerateInput("sample_mesh_surface: zero total area");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SurfaceSamples out;
    out.points.reserve(static_cast<std::size_t>(n));
    out.normals.reserve(static_cast<std::size_t>(n));
    const bool smooth = !mesh.normals.empty();
    for (int i = 0; i < n; ++i) {
        double pick = unit(rng) * total;
        std::size_t t = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), pick) - cdf.begin());
        t = std::min(t, mesh.triangles.size() - 1);
        const auto& tri = mesh.triangles[t];
        double a = unit(rng), b = unit(rng);
        if (a + b > 1.0) {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        double c = 1.0 - a - b;
        const Vec3& v0 = mesh.vertices[static_cast<std::size_t>(tri[0])];
        const Vec3& v1 = mesh.vertices[static_cast<std::size_t>(tri[1])];
        const Vec3& v2 = mesh.vertices[static_cast<std::size_t>(tri[2])];
        out.points.push_back(v0 * c + v1 * a + v2 * b);
        Vec3 nrm;
        if (smooth) {
            nrm = mesh.normals[static_cast<std::size_t>(tri[0])] * c +
                  mesh.normals[static_cast<std::size_t>(tri[1])] * a +
                  mesh.normals[static_cast<std::size_t>(tri[2])] * b;
            double len = norm(nrm);
            nrm = len > 1e-12 ? nrm / len : mesh.face_normal(t);
        } else {
            nrm = mesh.face_normal(t);
        }
        out.normals.push_back(nrm);
    }
    return out;
}

}  // namespace rdf
