#include <doctest.h>

#include <cmath>

#include "rdf/metrics.hpp"

using namespace rdf;

namespace {

TriangleMesh unit_square(double z) {
    TriangleMesh m;
    m.vertices = {{0, 0, z}, {1, 0, z}, {1, 1, z}, {0, 1, z}};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    return m;
}

}  // namespace

TEST_CASE("ray metrics hand case") {
    std::vector<double> pred = {2.0, 4.0}, gt = {1.0, 4.0};
    RayMetrics m = ray_metrics(pred, gt);
    CHECK(m.ade == doctest::Approx(0.5));
    CHECK(m.rmse == doctest::Approx(std::sqrt(0.5)));
    CHECK(m.abs_rel == doctest::Approx(0.5));
    CHECK(m.sq_rel == doctest::Approx(0.5));
    CHECK(m.delta == doctest::Approx(0.5));
    CHECK(m.n_samples == 2);
}

TEST_CASE("delta threshold is strict") {
    std::vector<double> gt = {1.0, 1.0, 1.0};
    std::vector<double> pred = {1.25, 1.0 / 1.25, 1.0};  // two exactly at the threshold
    RayMetrics m = ray_metrics(pred, gt);
    CHECK(m.delta == doctest::Approx(1.0 / 3.0));
    std::vector<double> under = {1.2499, 0.81, 1.0};
    CHECK(ray_metrics(under, gt).delta == doctest::Approx(1.0));
}

TEST_CASE("perfect prediction scores perfectly") {
    std::vector<double> gt = {0.5, 1.5, 7.25};
    RayMetrics m = ray_metrics(gt, gt);
    CHECK(m.ade == 0.0);
    CHECK(m.rmse == 0.0);
    CHECK(m.abs_rel == 0.0);
    CHECK(m.sq_rel == 0.0);
    CHECK(m.delta == 1.0);
}

TEST_CASE("ray metrics input validation") {
    std::vector<double> a = {1.0, 2.0}, b = {1.0}, empty;
    CHECK_THROWS_AS(ray_metrics(a, b), ShapeError);
    CHECK_THROWS_AS(ray_metrics(empty, empty), InvalidParameter);
    std::vector<double> bad_gt = {1.0, 0.0};
    CHECK_THROWS_AS(ray_metrics(a, bad_gt), InvalidParameter);
}

TEST_CASE("median and spread hand cases") {
    std::vector<double> odd = {5.0, 1.0, 3.0};
    CHECK(median(odd) == 3.0);
    std::vector<double> even = {4.0, 1.0, 2.0, 3.0};
    CHECK(median(even) == 2.5);
    // |1-2.5| + |2-2.5| + |3-2.5| + |4-2.5| = 4, mean 1.
    CHECK(median_abs_spread(even) == doctest::Approx(1.0));
    std::vector<double> one = {7.0};
    CHECK(median(one) == 7.0);
    CHECK(median_abs_spread(one) == 0.0);
}

TEST_CASE("scale alignment undoes an affine distortion") {
    std::vector<double> gt = {1.0, 2.0, 4.0, 8.0, 3.0};
    std::vector<double> pred(gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i) pred[i] = 2.5 * gt[i] + 7.0;
    std::vector<double> aligned = scale_align(pred, gt);
    REQUIRE(aligned.size() == gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i)
        CHECK(aligned[i] == doctest::Approx(gt[i]).epsilon(1e-12));

    std::vector<double> constant(gt.size(), 3.0);
    CHECK_THROWS_AS(scale_align(constant, gt), DegenerateInput);
}

TEST_CASE("identical meshes score zero distance and unit scores") {
    TriangleMesh m = unit_square(0.0);
    MeshMetrics mm = mesh_metrics(m, m, 5000, 0.05, 3);
    CHECK(mm.accuracy == 0.0);
    CHECK(mm.completion == 0.0);
    CHECK(mm.chamfer_l1 == 0.0);
    CHECK(mm.normal_accuracy == doctest::Approx(1.0));
    CHECK(mm.normal_completion == doctest::Approx(1.0));
    CHECK(mm.normal_consistency == doctest::Approx(1.0));
    CHECK(mm.precision == 1.0);
    CHECK(mm.recall == 1.0);
    CHECK(mm.f1 == 1.0);
}

TEST_CASE("parallel squares 0.03 apart") {
    TriangleMesh pred = unit_square(0.03), gt = unit_square(0.0);
    MeshMetrics mm = mesh_metrics(pred, gt, 20000, 0.05, 3);
    CHECK(mm.accuracy == doctest::Approx(0.03).epsilon(1e-6));
    CHECK(mm.completion == doctest::Approx(0.03).epsilon(1e-6));
    CHECK(mm.chamfer_l1 == doctest::Approx(0.03).epsilon(1e-6));
    CHECK(mm.normal_consistency == doctest::Approx(1.0));
    CHECK(mm.precision == 1.0);
    CHECK(mm.recall == 1.0);
    CHECK(mm.f1 == 1.0);

    MeshMetrics tight = mesh_metrics(pred, gt, 20000, 0.01, 3);
    CHECK(tight.precision == 0.0);
    CHECK(tight.recall == 0.0);
    CHECK(tight.f1 == 0.0);  // harmonic mean defined as 0 when both are 0
}

TEST_CASE("sample metrics asymmetric hand case") {
    SurfaceSamples pred, gt;
    pred.points = {{0, 0, 0}};
    pred.normals = {{1, 0, 0}};
    gt.points = {{0, 0, 1}, {0, 0, 3}};
    gt.normals = {{-1, 0, 0}, {1, 0, 0}};
    MeshMetrics mm = sample_metrics(pred, gt, 2.0);
    CHECK(mm.accuracy == doctest::Approx(1.0));
    CHECK(mm.completion == doctest::Approx(2.0));
    CHECK(mm.chamfer_l1 == doctest::Approx(1.5));
    CHECK(mm.precision == doctest::Approx(1.0));
    CHECK(mm.recall == doctest::Approx(0.5));
    CHECK(mm.f1 == doctest::Approx(2.0 / 3.0));
    // Normal dot products are unsigned: the flipped gt normal still matches.
    CHECK(mm.normal_accuracy == doctest::Approx(1.0));
    CHECK(mm.normal_completion == doctest::Approx(1.0));
}

TEST_CASE("mesh sampling is deterministic and area-uniform") {
    TriangleMesh m = unit_square(0.0);
    SurfaceSamples a = sample_mesh_surface(m, 4000, 9);
    SurfaceSamples b = sample_mesh_surface(m, 4000, 9);
    CHECK(a.points == b.points);
    Vec3 mean{0, 0, 0};
    for (const Vec3& p : a.points) {
        CHECK(p.x >= 0.0);
        CHECK(p.x <= 1.0);
        CHECK(p.z == 0.0);
        mean = mean + p;
    }
    mean = mean / 4000.0;
    CHECK(mean.x == doctest::Approx(0.5).epsilon(0.05));
    CHECK(mean.y == doctest::Approx(0.5).epsilon(0.05));
    for (const Vec3& n : a.normals) CHECK(std::abs(n.z) == doctest::Approx(1.0));
}
