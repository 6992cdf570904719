#include "rdf/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace rdf {

namespace {

// Cube corner c sits at ((c&1), (c>>1)&1, (c>>2)&1); the 12 edges are listed
// in a fixed order. The per-configuration triangulations (256-case table) are
// generated once by tracing iso-contour segments across the faces, with the
// ambiguous four-crossing face resolved by cutting off the inside corners.
// Both cells sharing a face see the same corner signs, so the resolution
// matches and the surface stays crack-free.

struct CubeTopology {
    std::array<std::array<int, 2>, 12> edge_corners;
    int edge_id[8][8];  // corner pair -> edge index, -1 if not an edge

    CubeTopology() {
        for (auto& row : edge_id) std::fill(std::begin(row), std::end(row), -1);
        int n = 0;
        for (int c = 0; c < 8; ++c)
            for (int axis = 0; axis < 3; ++axis) {
                int bit = 1 << axis;
                if (c & bit) continue;
                edge_corners[n] = {c, c | bit};
                edge_id[c][c | bit] = edge_id[c | bit][c] = n;
                ++n;
            }
    }
};

const CubeTopology& topology() {
    static const CubeTopology topo;
    return topo;
}

Vec3 corner_pos(int c) {
    return {static_cast<double>(c & 1), static_cast<double>((c >> 1) & 1),
            static_cast<double>((c >> 2) & 1)};
}

// Triangles as local edge-index triples, per 8-bit inside mask.
using CaseTable = std::array<std::vector<std::array<int, 3>>, 256>;

CaseTable build_case_table() {
    const CubeTopology& topo = topology();

    // Face corner cycles: for each axis and side, the four corners in order.
    std::array<std::array<int, 4>, 6> faces;
    int f = 0;
    for (int axis = 0; axis < 3; ++axis) {
        int b1 = 1 << ((axis + 1) % 3), b2 = 1 << ((axis + 2) % 3);
        for (int side = 0; side < 2; ++side) {
            int base = side ? (1 << axis) : 0;
            faces[f++] = {base, base | b1, base | b1 | b2, base | b2};
        }
    }

    CaseTable table;
    for (int mask = 1; mask < 255; ++mask) {
        auto inside = [&](int c) { return (mask >> c) & 1; };

        // Per crossed edge, the two segment partners (one from each face).
        std::array<std::array<int, 2>, 12> partner;
        std::array<int, 12> n_partner{};
        partner.fill({-1, -1});
        auto link = [&](int a, int b) {
            partner[static_cast<std::size_t>(a)][n_partner[static_cast<std::size_t>(a)]++] = b;
            partner[static_cast<std::size_t>(b)][n_partner[static_cast<std::size_t>(b)]++] = a;
        };

        for (const auto& face : faces) {
            int crossed[4], slots[4], nc = 0;
            for (int i = 0; i < 4; ++i) {
                int c0 = face[i], c1 = face[(i + 1) % 4];
                if (inside(c0) != inside(c1)) {
                    crossed[nc] = topo.edge_id[c0][c1];
                    slots[nc++] = i;
                }
            }
            if (nc == 2) {
                link(crossed[0], crossed[1]);
            } else if (nc == 4) {
                // All four edges crossed; pair (i, i+1) when the shared
                // corner between them is inside.
                for (int i = 0; i < 4; ++i) {
                    int j = (i + 1) % 4;
                    int shared = face[(slots[i] + 1) % 4];
                    if (inside(shared)) link(crossed[i], crossed[j]);
                }
            }
        }

        // Trace closed polygons over the segment graph.
        std::array<bool, 12> used{};
        Vec3 in_centroid{}, out_centroid{};
        int n_in = 0, n_out = 0;
        for (int c = 0; c < 8; ++c) {
            if (inside(c)) {
                in_centroid += corner_pos(c);
                ++n_in;
            } else {
                out_centroid += corner_pos(c);
                ++n_out;
            }
        }
        Vec3 ref = out_centroid / n_out - in_centroid / n_in;

        for (int start = 0; start < 12; ++start) {
            if (n_partner[static_cast<std::size_t>(start)] == 0 || used[static_cast<std::size_t>(start)]) continue;
            std::vector<int> poly;
            int cur = start, prev = -1;
            do {
                poly.push_back(cur);
                used[static_cast<std::size_t>(cur)] = true;
                const auto& p = partner[static_cast<std::size_t>(cur)];
                int next = (p[0] != prev) ? p[0] : p[1];
                prev = cur;
                cur = next;
            } while (cur != start);
            if (poly.size() < 3) continue;

            // Edge midpoints stand in for the interpolated vertices when
            // deciding the winding.
            auto mid = [&](int e) {
                return (corner_pos(topo.edge_corners[static_cast<std::size_t>(e)][0]) +
                        corner_pos(topo.edge_corners[static_cast<std::size_t>(e)][1])) * 0.5;
            };
            Vec3 normal{};
            for (std::size_t i = 0; i < poly.size(); ++i) {
                Vec3 a = mid(poly[i]), b = mid(poly[(i + 1) % poly.size()]);
                normal += cross(a, b);
            }
            if (dot(normal, ref) < 0.0) std::reverse(poly.begin(), poly.end());
            for (std::size_t i = 1; i + 1 < poly.size(); ++i)
                table[static_cast<std::size_t>(mask)].push_back({poly[0], poly[i], poly[i + 1]});
        }
    }
    return table;
}

const CaseTable& case_table() {
    static const CaseTable table = build_case_table();
    return table;
}

}  // namespace

TsdfVolume::TsdfVolume(const Vec3& origin, double voxel_size, int nx, int ny, int nz,
                       double truncation)
    : origin_(origin), voxel_(voxel_size), nx_(nx), ny_(ny), nz_(nz) {
    if (!(voxel_size > 0.0)) throw InvalidParameter("TsdfVolume: voxel_size must be positive");
    if (nx < 1 || ny < 1 || nz < 1) throw InvalidParameter("TsdfVolume: empty dimensions");
    truncation_ = truncation > 0.0 ? truncation : 4.0 * voxel_size;
    std::size_t n = static_cast<std::size_t>(nx) * ny * nz;
    tsdf_.assign(n, 0.0f);
    weight_.assign(n, 0.0f);
}

void TsdfVolume::integrate(const DepthMap& distances, const Camera& camera) {
    if (distances.width != camera.width || distances.height != camera.height)
        throw ShapeError("integrate: depth map size does not match camera");

    // Per-pixel conversion from ray-surface distance to z-depth.
    std::vector<float> cos_map(static_cast<std::size_t>(camera.width) * camera.height, 0.0f);
    const Vec3 fwd = camera.forward();
    for (int y = 0; y < camera.height; ++y)
        for (int x = 0; x < camera.width; ++x) {
            Ray ray = generate_ray(camera, x + 0.5, y + 0.5);
            cos_map[distances.index(x, y)] = static_cast<float>(dot(ray.direction, fwd));
        }

    for (int z = 0; z < nz_; ++z)
        for (int y = 0; y < ny_; ++y)
            for (int x = 0; x < nx_; ++x) {
                double u, v, zc;
                if (!project_point(camera, voxel_center(x, y, z), u, v, zc)) continue;
                int px = static_cast<int>(std::floor(u)), py = static_cast<int>(std::floor(v));
                if (px < 0 || px >= camera.width || py < 0 || py >= camera.height) continue;
                if (!distances.is_valid(px, py)) continue;
                double z_surface =
                    static_cast<double>(distances.at(px, py)) * cos_map[distances.index(px, py)];
                double sdf = z_surface - zc;
                if (sdf < -truncation_) continue;  // occluded beyond the band
                float f = static_cast<float>(std::clamp(sdf / truncation_, -1.0, 1.0));
                std::size_t i = index(x, y, z);
                float w = weight_[i];
                tsdf_[i] = (tsdf_[i] * w + f) / (w + 1.0f);
                weight_[i] = w + 1.0f;
            }
}

TriangleMesh TsdfVolume::extract_mesh() const {
    const CubeTopology& topo = topology();
    const CaseTable& table = case_table();

    TriangleMesh mesh;
    std::unordered_map<uint64_t, int> edge_vertex;
    auto edge_key = [&](int x, int y, int z, int axis) {
        return (static_cast<uint64_t>(index(x, y, z)) << 2) | static_cast<uint64_t>(axis);
    };

    for (int z = 0; z + 1 < nz_; ++z)
        for (int y = 0; y + 1 < ny_; ++y)
            for (int x = 0; x + 1 < nx_; ++x) {
                float v[8];
                int mask = 0;
                bool skip = false;
                for (int c = 0; c < 8; ++c) {
                    int cx = x + (c & 1), cy = y + ((c >> 1) & 1), cz = z + ((c >> 2) & 1);
                    if (weight(cx, cy, cz) == 0.0f) {
                        skip = true;
                        break;
                    }
                    v[c] = tsdf(cx, cy, cz);
                    if (v[c] < 0.0f) mask |= 1 << c;
                }
                if (skip || mask == 0 || mask == 255) continue;

                int local_vertex[12];
                std::fill(std::begin(local_vertex), std::end(local_vertex), -1);
                auto vertex_on_edge = [&](int e) {
                    if (local_vertex[e] >= 0) return local_vertex[e];
                    int c0 = topo.edge_corners[static_cast<std::size_t>(e)][0];
                    int c1 = topo.edge_corners[static_cast<std::size_t>(e)][1];
                    int axis = (c1 ^ c0) == 1 ? 0 : ((c1 ^ c0) == 2 ? 1 : 2);
                    int ex = x + (c0 & 1), ey = y + ((c0 >> 1) & 1), ez = z + ((c0 >> 2) & 1);
                    uint64_t key = edge_key(ex, ey, ez, axis);
                    auto it = edge_vertex.find(key);
                    if (it != edge_vertex.end()) return local_vertex[e] = it->second;
                    double a = v[c0], b = v[c1];
                    double t = a / (a - b);  // a != b: the edge is crossed
                    Vec3 p0 = voxel_center(ex, ey, ez);
                    Vec3 p1 = p0;
                    (axis == 0 ? p1.x : axis == 1 ? p1.y : p1.z) += voxel_;
                    mesh.vertices.push_back(p0 + (p1 - p0) * t);
                    int idx = static_cast<int>(mesh.vertices.size()) - 1;
                    edge_vertex.emplace(key, idx);
                    return local_vertex[e] = idx;
                };

                for (const auto& tri : table[static_cast<std::size_t>(mask)]) {
                    int i0 = vertex_on_edge(tri[0]);
                    int i1 = vertex_on_edge(tri[1]);
                    int i2 = vertex_on_edge(tri[2]);
                    if (i0 == i1 || i1 == i2 || i0 == i2) continue;
                    Vec3 e1 = mesh.vertices[static_cast<std::size_t>(i1)] - mesh.vertices[static_cast<std::size_t>(i0)];
                    Vec3 e2 = mesh.vertices[static_cast<std::size_t>(i2)] - mesh.vertices[static_cast<std::size_t>(i0)];
                    if (norm(cross(e1, e2)) <= 1e-12) continue;
                    mesh.triangles.push_back({i0, i1, i2});
                }
            }
    return mesh;
}

TsdfVolume make_volume(const Vec3& min, const Vec3& max, double voxel_size) {
    if (!(voxel_size > 0.0)) throw InvalidParameter("make_volume: voxel_size must be positive");
    double pad = 4.0 * voxel_size;
    Vec3 origin = min - Vec3{pad, pad, pad};
    Vec3 extent = max - min + Vec3{2 * pad, 2 * pad, 2 * pad};
    int nx = static_cast<int>(std::ceil(extent.x / voxel_size)) + 1;
    int ny = static_cast<int>(std::ceil(extent.y / voxel_size)) + 1;
    int nz = static_cast<int>(std::ceil(extent.z / voxel_size)) + 1;
    return TsdfVolume(origin, voxel_size, nx, ny, nz);
}

}  // namespace rdf
