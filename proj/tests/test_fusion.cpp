#include <doctest.h>

#include <cmath>

#include "rdf/fusion.hpp"
#include "rdf/metrics.hpp"
#include "rdf/synth.hpp"

using namespace rdf;

namespace {

Camera plane_camera() {
    Camera cam;
    cam.fx = cam.fy = 40;
    cam.cx = 32;
    cam.cy = 24;
    cam.width = 64;
    cam.height = 48;
    return cam;
}

}  // namespace

TEST_CASE("volume geometry and defaults") {
    TsdfVolume vol({0, 0, 0}, 0.1, 4, 5, 6);
    CHECK(vol.truncation() == doctest::Approx(0.4));
    CHECK(vol.voxel_center(0, 0, 0).x == doctest::Approx(0.05));
    CHECK(vol.tsdf_data().size() == 4u * 5u * 6u);
    for (float w : vol.weight_data()) CHECK(w == 0.0f);
    CHECK_THROWS_AS(TsdfVolume({0, 0, 0}, 0.0, 4, 4, 4), InvalidParameter);
    CHECK_THROWS_AS(TsdfVolume({0, 0, 0}, 0.1, 0, 4, 4), InvalidParameter);

    TsdfVolume padded = make_volume({0, 0, 0}, {1, 1, 1}, 0.1);
    CHECK(padded.origin().x <= -0.4 + 1e-9);
    CHECK(padded.nx() >= 18);
}

TEST_CASE("plane integration puts the zero crossing at the surface") {
    // Frontal plane at z = 1; camera at the origin looking along +z.
    AnalyticScene scene = AnalyticScene::plane({0, 0, 1}, {0, 0, -1}, 3, 3);
    Camera cam = plane_camera();
    DepthMap dm = render_oracle_view(scene, cam);
    TsdfVolume vol({-0.5, -0.5, 0.5}, 0.05, 20, 20, 20);
    vol.integrate(dm, cam);

    // Voxel column through the optical axis: positive before, negative after.
    for (int z = 0; z < 20; ++z) {
        double zc = vol.voxel_center(10, 10, z).z;
        float v = vol.tsdf(10, 10, z);
        float w = vol.weight(10, 10, z);
        if (zc < 1.0 - 0.06 && w > 0) CHECK(v > 0.0f);
        if (zc > 1.0 + 0.06 && zc < 1.0 + 0.19 && w > 0) CHECK(v < 0.0f);
    }

    TriangleMesh mesh = vol.extract_mesh();
    REQUIRE(!mesh.empty());
    mesh.validate();
    for (const Vec3& v : mesh.vertices) CHECK(v.z == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("integrating the same view twice averages to the same field") {
    AnalyticScene scene = AnalyticScene::plane({0, 0, 1}, {0, 0, -1}, 3, 3);
    Camera cam = plane_camera();
    DepthMap dm = render_oracle_view(scene, cam);
    TsdfVolume once({-0.5, -0.5, 0.5}, 0.05, 20, 20, 20);
    TsdfVolume twice({-0.5, -0.5, 0.5}, 0.05, 20, 20, 20);
    once.integrate(dm, cam);
    twice.integrate(dm, cam);
    twice.integrate(dm, cam);
    CHECK(once.tsdf_data() == twice.tsdf_data());
    for (std::size_t i = 0; i < once.weight_data().size(); ++i)
        CHECK(twice.weight_data()[i] == 2.0f * once.weight_data()[i]);
}

TEST_CASE("all-invalid depth map is a no-op") {
    Camera cam = plane_camera();
    DepthMap blank(cam.width, cam.height);
    TsdfVolume vol({-1, -1, 0}, 0.1, 10, 10, 10);
    vol.integrate(blank, cam);
    for (float w : vol.weight_data()) CHECK(w == 0.0f);
    CHECK(vol.extract_mesh().empty());
}

TEST_CASE("empty volume extracts an empty mesh") {
    TsdfVolume vol({0, 0, 0}, 0.1, 8, 8, 8);
    TriangleMesh mesh = vol.extract_mesh();
    CHECK(mesh.empty());
    CHECK(mesh.vertices.empty());
}

TEST_CASE("mismatched depth map dimensions throw") {
    Camera cam = plane_camera();
    DepthMap wrong(10, 10);
    TsdfVolume vol({0, 0, 0}, 0.1, 8, 8, 8);
    CHECK_THROWS_AS(vol.integrate(wrong, cam), ShapeError);
}

TEST_CASE("fused sphere is watertight-accurate to the voxel scale") {
    AnalyticScene scene = AnalyticScene::sphere({0, 0, 0}, 1.0);
    std::vector<Camera> cams = orbit_cameras(scene, 24, 3.0, 96, 72);
    TsdfVolume vol = make_volume({-1.1, -1.1, -1.1}, {1.1, 1.1, 1.1}, 0.04);
    for (const Camera& cam : cams) vol.integrate(render_oracle_view(scene, cam), cam);
    TriangleMesh mesh = vol.extract_mesh();
    REQUIRE(mesh.triangles.size() > 500);
    mesh.validate();

    // Vertex radii hug the unit sphere.
    for (const Vec3& v : mesh.vertices) CHECK(norm(v) == doctest::Approx(1.0).epsilon(0.05));

    // Chamfer against an analytic sampling stays under 2 voxels.
    SurfaceSamples pred = sample_mesh_surface(mesh, 20000, 1);
    PointCloud gt_pts = sample_points(scene, 20000, 2);
    SurfaceSamples gt;
    gt.points = gt_pts.positions;
    for (const Vec3& p : gt.points) gt.normals.push_back(normalized(p));
    MeshMetrics mm = sample_metrics(pred, gt, 0.05);
    CHECK(mm.chamfer_l1 < 0.08);
    CHECK(mm.normal_consistency > 0.97);
    CHECK(mm.f1 > 0.85);
}
