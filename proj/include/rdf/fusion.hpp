#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rdf/camera.hpp"
#include "rdf/depthmap.hpp"
#include "rdf/errors.hpp"
#include "rdf/mesh.hpp"
#include "rdf/vec.hpp"

namespace rdf {

// Truncated signed distance volume; tsdf is normalized to [-1, 1] by the
// truncation band (default 4 voxels). Positive = in front of the surface.
class TsdfVolume {
public:
    TsdfVolume(const Vec3& origin, double voxel_size, int nx, int ny, int nz,
               double truncation = 0.0);

    const Vec3& origin() const { return origin_; }
    double voxel_size() const { return voxel_; }
    double truncation() const { return truncation_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }

    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * ny_ + y) * nx_ + x;
    }
    Vec3 voxel_center(int x, int y, int z) const {
        return origin_ + Vec3{(x + 0.5) * voxel_, (y + 0.5) * voxel_, (z + 0.5) * voxel_};
    }
    float tsdf(int x, int y, int z) const { return tsdf_[index(x, y, z)]; }
    float weight(int x, int y, int z) const { return weight_[index(x, y, z)]; }
    std::vector<float>& tsdf_data() { return tsdf_; }
    const std::vector<float>& tsdf_data() const { return tsdf_; }
    std::vector<float>& weight_data() { return weight_; }
    const std::vector<float>& weight_data() const { return weight_; }

    // Fuses one view of ray-surface distances (weight 1 per view).
    void integrate(const DepthMap& distances, const Camera& camera);

    // Marching cubes at iso 0; cells touching weight-0 voxels are skipped.
    TriangleMesh extract_mesh() const;

private:
    Vec3 origin_;
    double voxel_ = 0.0, truncation_ = 0.0;
    int nx_ = 0, ny_ = 0, nz_ = 0;
    std::vector<float> tsdf_, weight_;
};

// Volume sized to cover [min, max] padded by the truncation band.
TsdfVolume make_volume(const Vec3& min, const Vec3& max, double voxel_size);

}  // namespace rdf
