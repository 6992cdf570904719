#pragma once

#include <cstdint>
#include <vector>

#include "rdf/errors.hpp"
#include "rdf/vec.hpp"

namespace rdf {

// Per-pixel ray-surface distance (meters) with a validity mask. Invalid
// pixels are rays that produced no raylet candidates (or missed geometry in
// oracle maps).
struct DepthMap {
    int width = 0, height = 0;
    std::vector<float> values;
    std::vector<uint8_t> valid;

    DepthMap() = default;
    DepthMap(int w, int h)
        : width(w), height(h),
          values(static_cast<std::size_t>(w) * h, 0.0f),
          valid(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x);
    }
    float at(int x, int y) const { return values[index(x, y)]; }
    bool is_valid(int x, int y) const { return valid[index(x, y)] != 0; }
    void set(int x, int y, float v) {
        values[index(x, y)] = v;
        valid[index(x, y)] = 1;
    }
    void set_invalid(int x, int y) {
        values[index(x, y)] = 0.0f;
        valid[index(x, y)] = 0;
    }
};

struct NormalMap {
    int width = 0, height = 0;
    std::vector<float> values;  // 3 floats per pixel, world space, unit on valid pixels
    std::vector<uint8_t> valid;

    NormalMap() = default;
    NormalMap(int w, int h)
        : width(w), height(h),
          values(static_cast<std::size_t>(w) * h * 3, 0.0f),
          valid(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x);
    }
    bool is_valid(int x, int y) const { return valid[index(x, y)] != 0; }
    void set(int x, int y, const Vec3& n) {
        std::size_t i = index(x, y);
        values[i * 3] = static_cast<float>(n.x);
        values[i * 3 + 1] = static_cast<float>(n.y);
        values[i * 3 + 2] = static_cast<float>(n.z);
        valid[i] = 1;
    }
    void set_invalid(int x, int y) {
        std::size_t i = index(x, y);
        values[i * 3] = values[i * 3 + 1] = values[i * 3 + 2] = 0.0f;
        valid[i] = 0;
    }
    Vec3 at(int x, int y) const {
        std::size_t i = index(x, y);
        return {values[i * 3], values[i * 3 + 1], values[i * 3 + 2]};
    }
};

}  // namespace rdf
