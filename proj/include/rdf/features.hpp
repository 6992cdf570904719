#pragma once

#include <cstdint>
#include <vector>

#include "rdf/errors.hpp"
#include "rdf/grid_knn.hpp"
#include "rdf/scene.hpp"

namespace rdf {

enum class FeatureMode : uint8_t { None = 0, LearnableTable = 1, Loaded = 2 };

// Which positional blocks of the per-neighbor row are included.
enum class NeighborInfo : uint8_t {
    XyzOnly = 0,       // [p_k | f_k]
    RelativeOnly = 1,  // [unit offset | distance | f_k]
    Both = 2,          // [p_k | unit offset | distance | f_k]
};

struct PerPointFeatures {
    FeatureMode mode = FeatureMode::None;
    int channels = 0;                // C
    std::vector<float> values;       // N x C row-major; empty when mode == None

    float* row(std::size_t i) { return values.data() + i * static_cast<std::size_t>(channels); }
    const float* row(std::size_t i) const {
        return values.data() + i * static_cast<std::size_t>(channels);
    }
    bool trainable() const { return mode == FeatureMode::LearnableTable; }
};

struct FeatureLayout {
    int k = 5;
    int channels = 32;
    NeighborInfo info = NeighborInfo::Both;

    int positional_width() const {
        switch (info) {
            case NeighborInfo::XyzOnly: return 3;
            case NeighborInfo::RelativeOnly: return 4;
            case NeighborInfo::Both: return 7;
        }
        return 7;
    }
    int row_width() const { return positional_width() + channels; }
    int neighbor_block_width() const { return k * row_width(); }
    // MLP input: p_l (3) + u_l (3) + flattened neighbor block.
    int input_width() const { return 6 + neighbor_block_width(); }
};

struct RayletFeature {
    std::vector<float> values;   // length = layout.input_width()
    std::vector<int> neighbors;  // K indices, ascending distance order
};

// Exact KNN over scene positions, grid-accelerated; ties broken by ascending
// index; pads by repeating the farthest index when the scene has < K points.
inline std::vector<int> knn(const Vec3& query, const PointGrid& grid, int k) {
    return grid.knn(query, k);
}

// Writes [p_l | u_l | per-neighbor rows] into dst (layout.input_width()
// entries). `table` may be null when layout.channels == 0. Shared by the
// float inference path and the templated training/gradient-check path.
template <typename T, typename PositionFn>
void fill_raylet_input(const Vec3& start, const Vec3& direction, std::span<const int> neighbors,
                       PositionFn&& position_of, const T* table, const FeatureLayout& layout,
                       T* dst) {
    *dst++ = static_cast<T>(start.x);
    *dst++ = static_cast<T>(start.y);
    *dst++ = static_cast<T>(start.z);
    *dst++ = static_cast<T>(direction.x);
    *dst++ = static_cast<T>(direction.y);
    *dst++ = static_cast<T>(direction.z);
    for (int k = 0; k < layout.k; ++k) {
        int idx = neighbors[static_cast<std::size_t>(k)];
        Vec3 pk = position_of(idx);
        Vec3 offset = pk - start;
        double d = norm(offset);
        // Coincident neighbor: zero unit offset, zero distance.
        Vec3 unit = d < 1e-12 ? Vec3{0, 0, 0} : offset / d;
        if (d < 1e-12) d = 0.0;
        if (layout.info != NeighborInfo::RelativeOnly) {
            *dst++ = static_cast<T>(pk.x);
            *dst++ = static_cast<T>(pk.y);
            *dst++ = static_cast<T>(pk.z);
        }
        if (layout.info != NeighborInfo::XyzOnly) {
            *dst++ = static_cast<T>(unit.x);
            *dst++ = static_cast<T>(unit.y);
            *dst++ = static_cast<T>(unit.z);
            *dst++ = static_cast<T>(d);
        }
        if (layout.channels > 0) {
            const T* src = table + static_cast<std::size_t>(idx) * layout.channels;
            for (int c = 0; c < layout.channels; ++c) *dst++ = src[c];
        }
    }
}

// Fills `out` with the neighbor block of Eq-layout rows ordered by ascending
// distance. A neighbor coincident with the raylet start contributes a zero
// unit offset and distance 0.
void assemble_feature(const Raylet& raylet, const PointGrid& grid, const PerPointFeatures& feats,
                      const FeatureLayout& layout, RayletFeature& out);

inline RayletFeature assemble_feature(const Raylet& raylet, const PointGrid& grid,
                                      const PerPointFeatures& feats, const FeatureLayout& layout) {
    RayletFeature f;
    assemble_feature(raylet, grid, feats, layout, f);
    return f;
}

}  // namespace rdf
