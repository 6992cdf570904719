#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rdf/camera.hpp"
#include "rdf/depthmap.hpp"
#include "rdf/errors.hpp"
#include "rdf/field.hpp"
#include "rdf/fusion.hpp"
#include "rdf/mesh.hpp"
#include "rdf/scene.hpp"

namespace rdf {

// PLY, auto-detected: vertices with scale_/rot_/opacity properties decode as
// Gaussians (sigmoid opacity, exp scale, quaternion normalized), otherwise as
// a plain point cloud. ASCII and binary-little-endian only.
SceneGeometry read_ply(const std::filesystem::path& path);
void write_ply(const std::filesystem::path& path, const PointCloud& cloud, bool binary = true);
void write_ply(const std::filesystem::path& path, const GaussianSet& set, bool binary = true);

void write_mesh_ply(const std::filesystem::path& path, const TriangleMesh& mesh);
void write_mesh_obj(const std::filesystem::path& path, const TriangleMesh& mesh);
TriangleMesh read_mesh_ply(const std::filesystem::path& path);

// PFM, grayscale "Pf", scale -1.0 (little-endian); invalid pixels are 0.
DepthMap read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const DepthMap& map);
// 16-bit PGM preview, max depth mapped to 65535.
void write_pgm16(const std::filesystem::path& path, const DepthMap& map);
// Normals packed into a 3-channel PFM ("PF").
void write_pfm(const std::filesystem::path& path, const NormalMap& map);

// One camera per JSON file: {fx,fy,cx,cy,width,height,world_from_camera:[16]}.
// A manifest file {"views":[...]} lists per-view files relative to itself.
Camera read_camera_json(const std::filesystem::path& path);
void write_camera_json(const std::filesystem::path& path, const Camera& camera);
std::vector<Camera> read_camera_manifest(const std::filesystem::path& path);
void write_camera_manifest(const std::filesystem::path& dir, std::span<const Camera> cameras);

// Weight checkpoint, magic "RLDF-W".
void save_checkpoint(const std::filesystem::path& path, const FieldModel<float>& model);
FieldModel<float> load_checkpoint(const std::filesystem::path& path);

// Loaded per-point embeddings, magic "RLDF-F": N x C row-major f32.
void save_features(const std::filesystem::path& path, std::size_t n, int channels,
                   std::span<const float> values);
std::vector<float> load_features(const std::filesystem::path& path, std::size_t& n_out,
                                 int& channels_out);

// Volume checkpoint, magic "RLDF-V".
void save_volume(const std::filesystem::path& path, const TsdfVolume& volume);
TsdfVolume load_volume(const std::filesystem::path& path);

void write_loss_csv(const std::filesystem::path& path,
                    std::span<const std::pair<int, double>> trace);

// Full run provenance, serialized into every output directory.
struct RunConfig {
    uint64_t seed = 0;
    int threads = 1;
    int steps = 2000;
    int batch_rays = 128;
    double lr = 1e-3;
    int t_train = 5;
    int t_test = 5;
    int k = 5;
    int channels = 32;
    int tile_px = 16;
    int hidden = 256;
    int hidden_layers = 8;
    std::string blend = "softmax";
    std::string neighbor_info = "both";
    std::string feature_mode = "learnable-table";

    TrainConfig to_train_config() const;
};

RunConfig read_run_config(const std::filesystem::path& path);
void write_run_config(const std::filesystem::path& path, const RunConfig& cfg);

}  // namespace rdf
