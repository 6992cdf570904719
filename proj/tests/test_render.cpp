#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rdf/render.hpp"

using namespace rdf;

namespace {

struct SceneCase {
    AnalyticScene scene;
    const char* name;
};

std::vector<SceneCase> closure_scenes() {
    return {{AnalyticScene::plane({0, 0, 2}, {0, 0, -1}, 2, 2), "plane"},
            {AnalyticScene::sphere({0, 0, 2.5}, 1.0), "sphere"},
            {AnalyticScene::box_interior({-2, -2, -1}, {2, 2, 5}), "box"}};
}

double angle_deg(const Vec3& a, const Vec3& b) {
    double c = std::clamp(dot(normalized(a), normalized(b)), -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

Camera front_camera(int w = 48, int h = 36) {
    Camera cam;
    cam.fx = cam.fy = 40;
    cam.cx = w / 2.0;
    cam.cy = h / 2.0;
    cam.width = w;
    cam.height = h;
    return cam;
}

}  // namespace

TEST_CASE("oracle closure: both encodings reproduce exact distances") {
    for (const SceneCase& sc : closure_scenes()) {
        CAPTURE(sc.name);
        Camera cam = front_camera();
        DepthMap gt = render_oracle_view(sc.scene, cam);
        OracleEvaluator oracle(sc.scene);

        PointCloud cloud = sample_points(sc.scene, 1500, 3);
        deduplicate_points(cloud);
        VirtualBallSet balls = compute_ball_radii(cloud);
        RayletSampler ball_sampler(cam, balls);
        GaussianSet gset = make_gaussians(sc.scene, 1500, 3);
        RayletSampler gauss_sampler(cam, gset);

        for (const RayletSampler* sampler : {&ball_sampler, &gauss_sampler}) {
            SampledDistanceField field(cam, *sampler, oracle, BlendMode::Softmax, 5);
            DepthMap dm = render_distance(field);
            int both = 0;
            for (int y = 0; y < cam.height; ++y)
                for (int x = 0; x < cam.width; ++x) {
                    if (!dm.is_valid(x, y) || !gt.is_valid(x, y)) continue;
                    ++both;
                    CHECK(std::abs(dm.at(x, y) - gt.at(x, y)) < 1e-6f);
                }
            CHECK(both > 200);
        }
    }
}

TEST_CASE("closure holds for T = 1") {
    AnalyticScene scene = AnalyticScene::sphere({0, 0, 2.5}, 1.0);
    Camera cam = front_camera();
    PointCloud cloud = sample_points(scene, 1500, 5);
    deduplicate_points(cloud);
    VirtualBallSet balls = compute_ball_radii(cloud);
    RayletSampler sampler(cam, balls);
    OracleEvaluator oracle(scene);
    SampledDistanceField field(cam, sampler, oracle, BlendMode::Mean, 1);
    DepthMap gt = render_oracle_view(scene, cam);
    DepthMap dm = render_distance(field);
    int both = 0;
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) {
            if (!dm.is_valid(x, y) || !gt.is_valid(x, y)) continue;
            ++both;
            CHECK(std::abs(dm.at(x, y) - gt.at(x, y)) < 1e-6f);
        }
    CHECK(both > 200);
}

TEST_CASE("derived plane normals are tight") {
    AnalyticScene scene = AnalyticScene::plane({0, 0, 2}, {0, 0, -1}, 3, 3);
    Camera cam = front_camera(64, 48);
    PointCloud cloud = sample_points(scene, 3000, 7);
    deduplicate_points(cloud);
    VirtualBallSet balls = compute_ball_radii(cloud);
    RayletSampler sampler(cam, balls);
    OracleEvaluator oracle(scene);
    SampledDistanceField field(cam, sampler, oracle, BlendMode::Softmax, 5);
    DepthMap dm = render_distance(field);
    NormalMap nm = render_normals(field, dm);
    int ok = 0, tight = 0;
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) {
            if (!nm.is_valid(x, y)) continue;
            ++ok;
            if (angle_deg(nm.at(x, y), {0, 0, -1}) < 0.1) ++tight;
        }
    CHECK(ok > 500);
    CHECK(static_cast<double>(tight) >= 0.99 * ok);
}

TEST_CASE("derived sphere normals track the radial direction") {
    AnalyticScene scene = AnalyticScene::sphere({0, 0, 2.5}, 1.0);
    Camera cam = front_camera(64, 48);
    PointCloud cloud = sample_points(scene, 4000, 11);
    deduplicate_points(cloud);
    VirtualBallSet balls = compute_ball_radii(cloud);
    RayletSampler sampler(cam, balls);
    OracleEvaluator oracle(scene);
    SampledDistanceField field(cam, sampler, oracle, BlendMode::Softmax, 5);
    DepthMap dm = render_distance(field);
    NormalMap nm = render_normals(field, dm);
    std::vector<double> errs;
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) {
            if (!nm.is_valid(x, y)) continue;
            Ray r = generate_ray(cam, x + 0.5, y + 0.5);
            Vec3 p = r.origin + r.direction * static_cast<double>(dm.at(x, y));
            Vec3 gt_normal = scene.surface_normal(p);
            if (dot(gt_normal, r.direction) > 0.0) gt_normal = gt_normal * -1.0;
            errs.push_back(angle_deg(nm.at(x, y), gt_normal));
        }
    REQUIRE(errs.size() > 300);
    std::nth_element(errs.begin(), errs.begin() + static_cast<long>(errs.size() / 2), errs.end());
    CHECK(errs[errs.size() / 2] < 1.0);
}

TEST_CASE("invalid depth pixels propagate into the normal map") {
    AnalyticScene scene = AnalyticScene::sphere({0, 0, 2.5}, 0.8);
    Camera cam = front_camera();
    PointCloud cloud = sample_points(scene, 1200, 13);
    deduplicate_points(cloud);
    VirtualBallSet balls = compute_ball_radii(cloud);
    RayletSampler sampler(cam, balls);
    OracleEvaluator oracle(scene);
    SampledDistanceField field(cam, sampler, oracle, BlendMode::Softmax, 5);
    DepthMap dm = render_distance(field);
    NormalMap nm = render_normals(field, dm);
    REQUIRE(nm.width == dm.width);
    int invalid_depth = 0;
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x)
            if (!dm.is_valid(x, y)) {
                ++invalid_depth;
                CHECK_FALSE(nm.is_valid(x, y));
            }
    CHECK(invalid_depth > 0);  // the small sphere does not cover the frame
}

TEST_CASE("camera facing away from the scene renders nothing") {
    AnalyticScene scene = AnalyticScene::sphere({0, 0, -5}, 1.0);  // behind the camera
    Camera cam = front_camera();
    PointCloud cloud = sample_points(scene, 500, 17);
    deduplicate_points(cloud);
    VirtualBallSet balls = compute_ball_radii(cloud);
    RayletSampler sampler(cam, balls);
    OracleEvaluator oracle(scene);
    SampledDistanceField field(cam, sampler, oracle, BlendMode::Softmax, 5);
    DepthMap dm = render_distance(field);
    for (uint8_t v : dm.valid) CHECK(v == 0);
}

TEST_CASE("model evaluator with a zero network blends rho") {
    AnalyticScene scene = AnalyticScene::sphere({0, 0, 2.5}, 1.0);
    Camera cam = front_camera();
    PointCloud cloud = sample_points(scene, 800, 19);
    deduplicate_points(cloud);
    VirtualBallSet balls = compute_ball_radii(cloud);
    RayletSampler sampler(cam, balls);

    FeatureLayout layout;
    layout.k = 3;
    layout.channels = 2;
    auto model = FieldModel<float>::make(layout, BlendMode::Mean, FeatureMode::LearnableTable,
                                         cloud.size(), 16, 1);
    PointGrid grid(cloud.positions);
    ModelEvaluator eval(model, grid);
    SampledDistanceField field(cam, sampler, eval, BlendMode::Mean, 5);

    double u = cam.cx, v = cam.cy;
    Ray ray = generate_ray(cam, u, v);
    auto cands = sampler.candidates(ray, u, v, 5);
    REQUIRE(!cands.empty());
    double mean_rho = 0.0;
    for (const auto& c : cands) mean_rho += c.raylet.t_start;
    mean_rho /= static_cast<double>(cands.size());
    std::vector<int> sources;
    auto d = field.evaluate(ray, u, v, &sources);
    REQUIRE(d.has_value());
    CHECK(*d == doctest::Approx(mean_rho).epsilon(1e-6));
    CHECK(sources.size() == cands.size());
}
