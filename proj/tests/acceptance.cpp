// Acceptance gate: one pass/fail line per criterion, exit code = #failures.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "rdf/field.hpp"
#include "rdf/fusion.hpp"
#include "rdf/io.hpp"
#include "rdf/metrics.hpp"
#include "rdf/render.hpp"
#include "rdf/sampling.hpp"
#include "rdf/synth.hpp"

namespace fs = std::filesystem;
using namespace rdf;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int index, const char* name, bool pass) {
    std::printf("criterion %2d: %-28s %s\n", index, name, pass ? "PASS" : "FAIL");
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

template <typename Fn>
void criterion(int index, const char* name, Fn&& fn) {
    bool pass = false;
    try {
        pass = fn();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "criterion %d threw: %s\n", index, e.what());
    }
    report(index, name, pass);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---- 1: sampler equals brute force on point clouds ------------------------

bool sampler_oracle_equivalence() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int scene = 0; scene < 20; ++scene) {
        PointCloud cloud;
        cloud.positions.reserve(10000);
        for (int i = 0; i < 10000; ++i) cloud.positions.push_back({u(rng), u(rng), u(rng)});
        deduplicate_points(cloud);
        VirtualBallSet balls = compute_ball_radii(cloud);

        Camera cam;
        cam.width = 160;
        cam.height = 120;
        cam.fx = cam.fy = 140;
        cam.cx = 80;
        cam.cy = 60;
        cam.translation = {u(rng), u(rng), -6.0};
        RayletSampler sampler(cam, balls);

        std::uniform_real_distribution<double> px(0.0, cam.width), py(0.0, cam.height);
        for (int r = 0; r < 1000; ++r) {
            double pu = px(rng), pv = py(rng);
            Ray ray = generate_ray(cam, pu, pv);
            for (int T : {1, 5, 10, 20}) {
                auto fast = sampler.candidates(ray, pu, pv, T);
                auto brute = ray_ball_feet(ray, balls, T);
                if (fast.size() != brute.size()) return false;
                for (std::size_t i = 0; i < fast.size(); ++i)
                    if (fast[i].source_index != brute[i].source_index ||
                        fast[i].raylet.t_start != brute[i].raylet.t_start ||
                        fast[i].rank_key != brute[i].rank_key)
                        return false;
            }
        }
    }
    return seconds_since(t0) < 60.0;
}

// ---- 2: closed-form ray-Gaussian t ----------------------------------------

bool ray_gaussian_closed_form() {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0), us(0.3, 1.5), uo(2.0, 8.0);
    for (int trial = 0; trial < 1000; ++trial) {
        Ray ray{{u(rng), u(rng), u(rng)}, normalized(Vec3{u(rng), u(rng), 2.0 + u(rng)})};
        Vec3 mean = ray.origin + ray.direction * uo(rng) + Vec3{u(rng), u(rng), u(rng)} * 0.5;
        Gaussian g;
        g.mean = mean;
        g.scale = {us(rng), us(rng), us(rng)};
        g.rotation = Quat{1.0 + u(rng), u(rng), u(rng), u(rng)}.normalized();
        Mat3 cov_inv = g.covariance_inverse();
        double t_closed = ray_gaussian_t(ray, cov_inv, g.mean);

        auto exponent = [&](double t) {
            Vec3 d = ray.origin + ray.direction * t - g.mean;
            return -0.5 * dot(d, cov_inv * d);
        };
        double best_t = -10.0, best_v = -1e300;
        for (double t = -10.0; t <= 20.0; t += 0.01) {
            double v = exponent(t);
            if (v > best_v) {
                best_v = v;
                best_t = t;
            }
        }
        double fine_t = best_t;
        for (double t = best_t - 0.02; t <= best_t + 0.02; t += 1e-4) {
            double v = exponent(t);
            if (v > best_v) {
                best_v = v;
                fine_t = t;
            }
        }
        if (std::abs(t_closed - fine_t) >= 1e-3) return false;
    }
    return true;
}

// ---- 3: full-model gradient check -----------------------------------------

bool gradient_check() {
    FeatureLayout layout;
    layout.k = 2;
    layout.channels = 4;
    layout.info = NeighborInfo::Both;

    for (BlendMode mode :
         {BlendMode::Softmax, BlendMode::Mean, BlendMode::Alpha, BlendMode::Sigmoid}) {
        std::mt19937_64 rng(30 + static_cast<uint64_t>(mode));
        std::uniform_real_distribution<double> up(-1.0, 1.0), ur(0.5, 4.0), ug(0.5, 5.0);
        TrainingSet set;
        set.layout = layout;
        for (int i = 0; i < 10; ++i) set.positions.push_back({up(rng), up(rng), up(rng)});
        PointGrid grid(set.positions);
        set.ray_begin.push_back(0);
        for (int r = 0; r < 4; ++r) {
            int n = 1 + r % 3;
            for (int j = 0; j < n; ++j) {
                Vec3 start{up(rng), up(rng), up(rng)};
                set.raylet_start.push_back(start);
                set.raylet_dir.push_back(normalized(Vec3{up(rng), up(rng), 1.5}));
                set.raylet_rho.push_back(static_cast<float>(ur(rng)));
                auto nbrs = grid.knn(start, layout.k);
                set.raylet_neighbors.insert(set.raylet_neighbors.end(), nbrs.begin(), nbrs.end());
            }
            set.ray_gt.push_back(static_cast<float>(ug(rng)));
            set.ray_begin.push_back(static_cast<uint32_t>(set.raylet_start.size()));
        }

        auto model = FieldModel<double>::make(layout, mode, FeatureMode::LearnableTable,
                                              set.positions.size(), 8, 2);
        model.initialize(3);
        std::vector<uint32_t> batch = {0, 1, 2, 3};
        std::vector<double> grads(model.param_count(), 0.0);
        compute_batch_gradient(model, set, batch, grads);

        auto batch_loss = [&](void) {
            double total = 0.0;
            for (uint32_t r : batch)
                total += std::abs(predict_ray(model, set, r) - static_cast<double>(set.ray_gt[r]));
            return total / static_cast<double>(batch.size());
        };
        const double h = 1e-5;
        for (std::size_t i = 0; i < model.param_count(); ++i) {
            double saved = model.param(i);
            model.param(i) = saved + h;
            double up_v = batch_loss();
            model.param(i) = saved - h;
            double dn_v = batch_loss();
            model.param(i) = saved;
            double fd = (up_v - dn_v) / (2 * h);
            double err = std::abs(grads[i] - fd);
            if (err >= 1e-8 && err / std::max(std::abs(fd), 1e-8) >= 1e-4) return false;
        }
    }
    return true;
}

// ---- 4: blend contract ----------------------------------------------------

bool blend_contract() {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> un(1, 20);
    std::uniform_real_distribution<double> ur(0.5, 10.0), ud(-1.0, 1.0);
    std::uniform_int_distribution<int> uq(-4096, 4096);
    constexpr BlendMode modes[] = {BlendMode::Softmax, BlendMode::Mean, BlendMode::Alpha,
                                   BlendMode::Sigmoid};
    for (int trial = 0; trial < 10000; ++trial) {
        std::size_t n = un(rng);
        std::vector<double> rho(n), d(n), s(n);
        for (std::size_t i = 0; i < n; ++i) {
            rho[i] = ur(rng);
            d[i] = ud(rng);
            s[i] = uq(rng) / 1024.0;  // exactly representable scores
        }
        BlendMode mode = modes[static_cast<std::size_t>(trial) % 4];
        auto r = blend<double>(rho, d, s, mode);
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < n; ++i) {
            lo = std::min(lo, rho[i] + d[i]);
            hi = std::max(hi, rho[i] + d[i]);
        }
        if (!(r.value >= lo - 1e-9 && r.value <= hi + 1e-9)) return false;

        if (n == 1 && r.value != rho[0] + d[0]) return false;

        if (mode == BlendMode::Softmax) {
            // Shift by an exactly-representable constant: bitwise weights.
            std::vector<double> shifted = s;
            for (double& v : shifted) v += 2.0;
            auto rs = blend<double>(rho, d, shifted, mode);
            for (std::size_t i = 0; i < n; ++i)
                if (rs.weights[i] != r.weights[i]) return false;

            // Permutation: same value and matched weights.
            std::vector<std::size_t> perm(n);
            for (std::size_t i = 0; i < n; ++i) perm[i] = (i + 1) % n;
            std::vector<double> prho(n), pd(n), ps(n);
            for (std::size_t i = 0; i < n; ++i) {
                prho[i] = rho[perm[i]];
                pd[i] = d[perm[i]];
                ps[i] = s[perm[i]];
            }
            auto rp = blend<double>(prho, pd, ps, mode);
            if (std::abs(rp.value - r.value) > 1e-12 * std::max(1.0, std::abs(r.value)))
                return false;
            for (std::size_t i = 0; i < n; ++i)
                if (std::abs(rp.weights[i] - r.weights[perm[i]]) > 1e-12) return false;
        }
    }
    return true;
}

// ---- 5: end-to-end oracle closure -----------------------------------------

bool oracle_closure() {
    std::vector<AnalyticScene> scenes = {AnalyticScene::plane({0, 0, 2}, {0, 0, -1}, 2, 2),
                                         AnalyticScene::sphere({0, 0, 2.5}, 1.0),
                                         AnalyticScene::box_interior({-2, -2, -1}, {2, 2, 5})};
    Camera cam;
    cam.fx = cam.fy = 40;
    cam.cx = 24;
    cam.cy = 18;
    cam.width = 48;
    cam.height = 36;
    for (const AnalyticScene& scene : scenes) {
        DepthMap gt = render_oracle_view(scene, cam);
        OracleEvaluator oracle(scene);
        PointCloud cloud = sample_points(scene, 1500, 5);
        deduplicate_points(cloud);
        VirtualBallSet balls = compute_ball_radii(cloud);
        RayletSampler ball_sampler(cam, balls);
        GaussianSet gset = make_gaussians(scene, 1500, 5);
        RayletSampler gauss_sampler(cam, gset);
        for (const RayletSampler* sampler : {&ball_sampler, &gauss_sampler}) {
            SampledDistanceField field(cam, *sampler, oracle, BlendMode::Softmax, 5);
            DepthMap dm = render_distance(field);
            int both = 0;
            for (int y = 0; y < cam.height; ++y)
                for (int x = 0; x < cam.width; ++x) {
                    if (!dm.is_valid(x, y) || !gt.is_valid(x, y)) continue;
                    ++both;
                    if (std::abs(dm.at(x, y) - gt.at(x, y)) >= 1e-6f) return false;
                }
            if (both < 100) return false;
        }
    }
    return true;
}

// ---- 6 & 7: desk-scale learning and T monotonicity ------------------------

struct DeskScene {
    SceneGeometry geom;
    std::vector<TrainView> train_views;
    Camera held_out;
    DepthMap held_out_gt;
    AnalyticScene scene = AnalyticScene::sphere_in_box({0, 0, 0}, 1.0, {-2, -2, -2}, {2, 2, 2});
};

DeskScene make_desk_scene(uint64_t seed, int views) {
    DeskScene d;
    PointCloud cloud = sample_points(d.scene, 10000, seed);
    deduplicate_points(cloud);
    d.geom = cloud;
    std::vector<Camera> cams = orbit_cameras(d.scene, views + 1, 1.5, 160, 120);
    for (int i = 0; i < views; ++i)
        d.train_views.push_back({cams[static_cast<std::size_t>(i)],
                                 render_oracle_view(d.scene, cams[static_cast<std::size_t>(i)])});
    d.held_out = cams.back();
    d.held_out_gt = render_oracle_view(d.scene, d.held_out);
    return d;
}

// ADE of the model (t_test raylets) and of the nearest-candidate-foot
// baseline on the held-out view, over pixels valid in both.
void held_out_ade(const DeskScene& d, const FieldModel<float>& model, int t_test,
                  double& model_ade, double& baseline_ade) {
    const PointCloud& cloud = std::get<PointCloud>(d.geom);
    PointGrid grid(cloud.positions);
    VirtualBallSet balls = compute_ball_radii(cloud);
    RayletSampler sampler(d.held_out, balls);
    ModelEvaluator evaluator(model, grid);
    SampledDistanceField field(d.held_out, sampler, evaluator, model.blend_mode, t_test);

    std::vector<double> pred, base, gt;
    for (int y = 0; y < d.held_out.height; ++y)
        for (int x = 0; x < d.held_out.width; ++x) {
            if (!d.held_out_gt.is_valid(x, y)) continue;
            double u = x + 0.5, v = y + 0.5;
            Ray ray = generate_ray(d.held_out, u, v);
            auto cands = sampler.candidates(ray, u, v, t_test);
            if (cands.empty()) continue;
            auto value = field.evaluate(ray, u, v);
            if (!value) continue;
            pred.push_back(*value);
            base.push_back(cands[0].raylet.t_start);
            gt.push_back(static_cast<double>(d.held_out_gt.at(x, y)));
        }
    model_ade = ray_metrics(pred, gt).ade;
    baseline_ade = ray_metrics(base, gt).ade;
}

bool g_desk_done = false;
double g_desk_seconds = 0.0;

bool desk_scale_learning() {
    auto t0 = Clock::now();
    DeskScene d = make_desk_scene(6, 30);
    TrainConfig cfg;
    cfg.seed = 6;
    cfg.steps = 2000;
    cfg.batch_rays = 128;
    cfg.t_train = 5;
    cfg.layout.k = 5;
    cfg.layout.channels = 32;
    TrainResult res = train(d.geom, d.train_views, cfg);
    double model_ade = 0.0, baseline_ade = 0.0;
    held_out_ade(d, res.model, 5, model_ade, baseline_ade);
    g_desk_seconds = seconds_since(t0);
    g_desk_done = true;
    std::printf("  desk-scale: ADE %.4f vs baseline %.4f (%.0f s)\n", model_ade, baseline_ade,
                g_desk_seconds);
    return model_ade < baseline_ade && model_ade < 0.5 * baseline_ade && g_desk_seconds < 600.0;
}

bool t_monotonicity() {
    int satisfied = 0;
    for (uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
        DeskScene d = make_desk_scene(seed, 10);
        TrainConfig cfg;
        cfg.seed = seed;
        cfg.steps = 400;
        cfg.batch_rays = 128;
        cfg.t_train = 5;
        cfg.layout.k = 5;
        cfg.layout.channels = 16;
        cfg.hidden = 128;
        cfg.hidden_layers = 4;
        TrainResult res = train(d.geom, d.train_views, cfg);
        double ade1 = 0.0, ade5 = 0.0, base = 0.0;
        held_out_ade(d, res.model, 1, ade1, base);
        held_out_ade(d, res.model, 5, ade5, base);
        std::printf("  seed %llu: ADE(T=1) %.4f ADE(T=5) %.4f\n",
                    static_cast<unsigned long long>(seed), ade1, ade5);
        if (ade5 <= ade1) ++satisfied;
    }
    return satisfied >= 3;
}

// ---- 8: normal derivation -------------------------------------------------

double angle_deg(const Vec3& a, const Vec3& b) {
    double c = std::clamp(dot(normalized(a), normalized(b)), -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

bool normal_derivation() {
    Camera cam;
    cam.fx = cam.fy = 40;
    cam.cx = 32;
    cam.cy = 24;
    cam.width = 64;
    cam.height = 48;

    {
        AnalyticScene scene = AnalyticScene::plane({0, 0, 2}, {0, 0, -1}, 3, 3);
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
        if (ok < 500 || tight < 0.99 * ok) return false;
    }
    {
        AnalyticScene scene = AnalyticScene::sphere({0, 0, 2.5}, 1.0);
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
                Vec3 gt_n = scene.surface_normal(p);
                if (dot(gt_n, r.direction) > 0.0) gt_n = gt_n * -1.0;
                errs.push_back(angle_deg(nm.at(x, y), gt_n));
            }
        if (errs.size() < 300) return false;
        std::nth_element(errs.begin(), errs.begin() + static_cast<long>(errs.size() / 2),
                         errs.end());
        if (errs[errs.size() / 2] >= 1.0) return false;
    }
    return true;
}

// ---- 9: metrics golden cases ----------------------------------------------

bool metrics_golden() {
    {
        std::vector<double> pred = {2.0, 4.0}, gt = {1.0, 4.0};
        RayMetrics m = ray_metrics(pred, gt);
        if (m.ade != 0.5 || std::abs(m.rmse - std::sqrt(0.5)) > 1e-15 || m.abs_rel != 0.5 ||
            m.sq_rel != 0.5 || m.delta != 0.5)
            return false;
    }
    {
        std::vector<double> gt = {1.0}, edge = {1.25};
        if (ray_metrics(edge, gt).delta != 0.0) return false;  // strict threshold
        std::vector<double> inside = {1.2499};
        if (ray_metrics(inside, gt).delta != 1.0) return false;
    }
    {
        TriangleMesh a, b;
        a.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
        a.triangles = {{0, 1, 2}, {0, 2, 3}};
        b = a;
        for (Vec3& v : b.vertices) v.z = 0.03;
        MeshMetrics self = mesh_metrics(a, a, 5000, 0.05, 3);
        if (self.chamfer_l1 != 0.0 || self.f1 != 1.0) return false;
        MeshMetrics par = mesh_metrics(b, a, 5000, 0.05, 3);
        if (std::abs(par.accuracy - 0.03) > 1e-9 || std::abs(par.completion - 0.03) > 1e-9)
            return false;
        if (par.precision != 1.0 || par.recall != 1.0 || par.f1 != 1.0) return false;
    }
    {
        std::vector<double> gt = {1.0, 2.0, 4.0, 8.0, 3.0};
        std::vector<double> pred(gt.size());
        for (std::size_t i = 0; i < gt.size(); ++i) pred[i] = 3.5 * gt[i] + 2.0;
        std::vector<double> aligned = scale_align(pred, gt);
        for (std::size_t i = 0; i < gt.size(); ++i)
            if (std::abs(aligned[i] - gt[i]) > 1e-12) return false;
    }
    return true;
}

// ---- 10: TSDF pipeline ----------------------------------------------------

bool tsdf_pipeline() {
    AnalyticScene scene = AnalyticScene::sphere({0, 0, 0}, 1.0);
    std::vector<Camera> cams = orbit_cameras(scene, 40, 3.0, 120, 90);
    TsdfVolume vol = make_volume({-1.1, -1.1, -1.1}, {1.1, 1.1, 1.1}, 0.02);
    for (const Camera& cam : cams) vol.integrate(render_oracle_view(scene, cam), cam);
    TriangleMesh mesh = vol.extract_mesh();
    if (mesh.triangles.size() < 1000) return false;
    SurfaceSamples pred = sample_mesh_surface(mesh, 30000, 1);
    PointCloud gt_pts = sample_points(scene, 30000, 2);
    SurfaceSamples gt;
    gt.points = gt_pts.positions;
    for (const Vec3& p : gt.points) gt.normals.push_back(normalized(p));
    MeshMetrics mm = sample_metrics(pred, gt, 0.05);
    std::printf("  tsdf: chamfer %.4f\n", mm.chamfer_l1);
    return mm.chamfer_l1 < 0.04;
}

// ---- 11: reproducibility + fuzz survival ----------------------------------

std::vector<uint8_t> file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(RDF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool reproducibility_and_fuzz() {
    fs::path tmp = fs::temp_directory_path() /
                   ("rdf_accept_" + std::to_string(std::random_device{}()));
    fs::create_directories(tmp);
    bool ok = true;

    std::string data = (tmp / "data").string();
    ok &= run_cli("--seed 5 synth --scene sphere --points 800 --views 4 --width 48 --height 36 "
                  "--out " + data) == 0;
    std::string train_args = " train --scene " + data + "/scene.ply --views " + data +
                             " --steps 10 --batch-rays 16 --hidden 32 --hidden-layers 1 "
                             "--k 3 --channels 4 --out ";
    ok &= run_cli("--seed 7" + train_args + (tmp / "a").string()) == 0;
    ok &= run_cli("--seed 7" + train_args + (tmp / "b").string()) == 0;
    ok &= file_bytes(tmp / "a" / "checkpoint.rldfw") == file_bytes(tmp / "b" / "checkpoint.rldfw");

    // 1000 mutated files across the binary parsers; any crash aborts the run.
    PointCloud cloud;
    cloud.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0.5, 0.5, 1.0}};
    fs::path ply = tmp / "seed.ply";
    write_ply(ply, cloud, true);
    DepthMap dm(4, 3);
    dm.set(1, 1, 2.5f);
    fs::path pfm = tmp / "seed.pfm";
    write_pfm(pfm, dm);
    fs::path ckpt = tmp / "a" / "checkpoint.rldfw";

    std::mt19937_64 rng(2025);
    fs::path scratch = tmp / "scratch.bin";
    std::vector<fs::path> seeds = {ply, pfm, ckpt};
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<uint8_t> bytes = file_bytes(seeds[static_cast<std::size_t>(trial) % 3]);
        std::uniform_int_distribution<std::size_t> pos(0, bytes.empty() ? 0 : bytes.size() - 1);
        std::uniform_int_distribution<int> val(0, 255);
        if (trial % 4 == 0 && !bytes.empty()) bytes.resize(pos(rng));
        for (int i = 0; i < 8 && !bytes.empty(); ++i)
            bytes[pos(rng)] = static_cast<uint8_t>(val(rng));
        std::ofstream out(scratch, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        out.close();
        try {
            switch (trial % 3) {
                case 0: read_ply(scratch); break;
                case 1: read_pfm(scratch); break;
                default: load_checkpoint(scratch); break;
            }
        } catch (const std::exception&) {
        }
    }
    fs::remove_all(tmp);
    return ok;
}

}  // namespace

int main() {
    criterion(1, "sampler oracle equivalence", sampler_oracle_equivalence);
    criterion(2, "ray-gaussian closed form", ray_gaussian_closed_form);
    criterion(3, "gradient correctness", gradient_check);
    criterion(4, "blend contract", blend_contract);
    criterion(5, "end-to-end oracle closure", oracle_closure);
    criterion(6, "desk-scale learning", desk_scale_learning);
    criterion(7, "test-time T monotonicity", t_monotonicity);
    criterion(8, "normal derivation", normal_derivation);
    criterion(9, "metrics golden cases", metrics_golden);
    criterion(10, "tsdf pipeline", tsdf_pipeline);
    criterion(11, "reproducibility + fuzz", reproducibility_and_fuzz);
    return g_failures;
}
