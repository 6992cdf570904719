#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdf/field.hpp"
#include "rdf/fusion.hpp"
#include "rdf/io.hpp"
#include "rdf/metrics.hpp"
#include "rdf/render.hpp"
#include "rdf/sampling.hpp"
#include "rdf/synth.hpp"

namespace fs = std::filesystem;
using namespace rdf;

namespace {

AnalyticScene make_scene(const std::string& name) {
    if (name == "plane") return AnalyticScene::plane({0, 0, 2}, {0, 0, -1}, 1.5, 1.5);
    if (name == "sphere") return AnalyticScene::sphere({0, 0, 0}, 1.0);
    if (name == "box") return AnalyticScene::box_interior({-2, -2, -2}, {2, 2, 2});
    if (name == "sphere-in-box")
        return AnalyticScene::sphere_in_box({0, 0, 0}, 1.0, {-2, -2, -2}, {2, 2, 2});
    throw InvalidParameter("unknown scene '" + name + "'");
}

std::string view_name(const char* prefix, std::size_t i, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%03zu.%s", prefix, i, ext);
    return buf;
}

std::vector<double> collect_pairs(const DepthMap& pred, const DepthMap& gt,
                                  std::vector<double>& gt_out) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw ShapeError("depth maps have different sizes");
    std::vector<double> pred_out;
    for (int y = 0; y < gt.height; ++y)
        for (int x = 0; x < gt.width; ++x)
            if (pred.is_valid(x, y) && gt.is_valid(x, y)) {
                pred_out.push_back(pred.at(x, y));
                gt_out.push_back(gt.at(x, y));
            }
    return pred_out;
}

void print_ray_metrics(std::ostream& os, const RayMetrics& m) {
    os << "ADE,RMSE,Abs-Rel,Sq-Rel,delta\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f\n", m.ade, m.rmse, m.abs_rel,
                  m.sq_rel, m.delta);
    os << buf;
}

void print_mesh_metrics(std::ostream& os, const MeshMetrics& m) {
    os << "accuracy,completion,chamfer_l1,normal_accuracy,normal_completion,normal_consistency,"
          "precision,recall,f1\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", m.accuracy,
                  m.completion, m.chamfer_l1, m.normal_accuracy, m.normal_completion,
                  m.normal_consistency, m.precision, m.recall, m.f1);
    os << buf;
}

int cmd_synth(const RunConfig& run, const std::string& scene_name, int points, int views,
              int width, int height, const std::string& encoding, const fs::path& out) {
    AnalyticScene scene = make_scene(scene_name);
    fs::create_directories(out);
    if (encoding == "points") {
        write_ply(out / "scene.ply", sample_points(scene, points, run.seed));
    } else if (encoding == "gaussians") {
        write_ply(out / "scene.ply", make_gaussians(scene, points, run.seed));
    } else {
        throw InvalidParameter("unknown encoding '" + encoding + "'");
    }
    double radius = scene_name == "box" || scene_name == "sphere-in-box" ? 1.2 : 3.0;
    std::vector<Camera> cams = orbit_cameras(scene, views, radius, width, height);
    write_camera_manifest(out, cams);
    for (std::size_t i = 0; i < cams.size(); ++i)
        write_pfm(out / view_name("gt", i, "pfm"), render_oracle_view(scene, cams[i]));
    write_run_config(out / "run_config.json", run);
    return 0;
}

int cmd_train(const RunConfig& run, const fs::path& scene_path, const fs::path& views_dir,
              const fs::path& out) {
    SceneGeometry scene = read_ply(scene_path);
    std::vector<Camera> cams = read_camera_manifest(views_dir / "cameras.json");
    std::vector<TrainView> views;
    for (std::size_t i = 0; i < cams.size(); ++i)
        views.push_back({cams[i], read_pfm(views_dir / view_name("gt", i, "pfm"))});
    TrainResult result = train(scene, views, run.to_train_config());
    fs::create_directories(out);
    save_checkpoint(out / "checkpoint.rldfw", result.model);
    write_loss_csv(out / "loss.csv", result.loss_trace);
    write_run_config(out / "run_config.json", run);
    std::cout << "trained on " << result.train_rays << " rays; final loss "
              << (result.loss_trace.empty() ? 0.0 : result.loss_trace.back().second) << "\n";
    return 0;
}

int cmd_render(const RunConfig& run, const fs::path& checkpoint, const fs::path& scene_path,
               const fs::path& camera_path, const fs::path& out_depth, const fs::path& out_normal,
               const fs::path& out_preview) {
    FieldModel<float> model = load_checkpoint(checkpoint);
    SceneGeometry scene = read_ply(scene_path);
    Camera cam = read_camera_json(camera_path);

    std::vector<Vec3> positions(scene_size(scene));
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = scene_position(scene, i);
    PointGrid grid(positions);

    std::unique_ptr<RayletSampler> sampler;
    VirtualBallSet balls;
    if (const auto* pc = std::get_if<PointCloud>(&scene)) {
        balls = compute_ball_radii(*pc);
        sampler = std::make_unique<RayletSampler>(cam, balls, run.tile_px);
    } else {
        sampler = std::make_unique<RayletSampler>(cam, std::get<GaussianSet>(scene), run.tile_px);
    }
    ModelEvaluator evaluator(model, grid);
    SampledDistanceField field(cam, *sampler, evaluator, model.blend_mode, run.t_test);
    DepthMap depth = render_distance(field);
    if (!out_depth.empty()) write_pfm(out_depth, depth);
    if (!out_preview.empty()) write_pgm16(out_preview, depth);
    if (!out_normal.empty()) write_pfm(out_normal, render_normals(field, depth));
    return 0;
}

int cmd_eval_depth(const fs::path& pred_path, const fs::path& gt_path, const std::string& align,
                   const fs::path& out_csv) {
    DepthMap pred = read_pfm(pred_path), gt = read_pfm(gt_path);
    std::vector<double> gt_v;
    std::vector<double> pred_v = collect_pairs(pred, gt, gt_v);
    if (pred_v.empty()) throw DegenerateInput("no jointly valid pixels");
    if (align == "median-mad")
        pred_v = scale_align(pred_v, gt_v);
    else if (!align.empty())
        throw InvalidParameter("unknown alignment '" + align + "'");
    RayMetrics m = ray_metrics(pred_v, gt_v);
    print_ray_metrics(std::cout, m);
    if (!out_csv.empty()) {
        std::ostringstream ss;
        print_ray_metrics(ss, m);
        std::ofstream f(out_csv);
        f << ss.str();
    }
    return 0;
}

int cmd_fuse(const fs::path& views_dir, const std::string& prefix, double voxel,
             const fs::path& out_mesh, const fs::path& out_volume) {
    std::vector<Camera> cams = read_camera_manifest(views_dir / "cameras.json");
    std::vector<DepthMap> maps;
    for (std::size_t i = 0; i < cams.size(); ++i)
        maps.push_back(read_pfm(views_dir / view_name(prefix.c_str(), i, "pfm")));

    Vec3 lo{1e30, 1e30, 1e30}, hi{-1e30, -1e30, -1e30};
    bool any = false;
    for (std::size_t i = 0; i < cams.size(); ++i)
        for (int y = 0; y < maps[i].height; ++y)
            for (int x = 0; x < maps[i].width; ++x) {
                if (!maps[i].is_valid(x, y)) continue;
                Ray ray = generate_ray(cams[i], x + 0.5, y + 0.5);
                Vec3 p = ray.origin + ray.direction * static_cast<double>(maps[i].at(x, y));
                lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
                hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
                any = true;
            }
    if (!any) throw DegenerateInput("all depth maps are empty");

    TsdfVolume volume = make_volume(lo, hi, voxel);
    for (std::size_t i = 0; i < cams.size(); ++i) volume.integrate(maps[i], cams[i]);
    TriangleMesh mesh = volume.extract_mesh();
    write_mesh_ply(out_mesh, mesh);
    if (!out_volume.empty()) save_volume(out_volume, volume);
    std::cout << "mesh: " << mesh.vertices.size() << " vertices, " << mesh.triangles.size()
              << " triangles\n";
    return 0;
}

int cmd_eval_mesh(const fs::path& pred_path, const fs::path& gt_path, int samples,
                  double threshold, uint64_t seed, const fs::path& out_csv) {
    TriangleMesh pred = read_mesh_ply(pred_path), gt = read_mesh_ply(gt_path);
    MeshMetrics m = mesh_metrics(pred, gt, samples, threshold, seed);
    print_mesh_metrics(std::cout, m);
    if (!out_csv.empty()) {
        std::ostringstream ss;
        print_mesh_metrics(ss, m);
        std::ofstream f(out_csv);
        f << ss.str();
    }
    return 0;
}

int cmd_intersect_bench(uint64_t seed, int scenes, int points, int rays) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::size_t mismatches = 0, total_rays = 0, total_candidates = 0;
    double elapsed = 0.0;

    for (int s = 0; s < scenes; ++s) {
        PointCloud cloud;
        for (int i = 0; i < points; ++i)
            cloud.positions.push_back({unit(rng) * 2, unit(rng) * 2, unit(rng) * 2});
        deduplicate_points(cloud);
        VirtualBallSet balls = compute_ball_radii(cloud);

        Camera cam;
        cam.width = 64;
        cam.height = 48;
        cam.fx = cam.fy = 60;
        cam.cx = 32;
        cam.cy = 24;
        cam.translation = {unit(rng) * 4, unit(rng) * 4, -6.0};
        RayletSampler sampler(cam, balls);

        std::uniform_real_distribution<double> px(0.0, cam.width), py(0.0, cam.height);
        std::uniform_int_distribution<int> pick_t(1, 20);
        auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < rays; ++r) {
            double u = px(rng), v = py(rng);
            int t = pick_t(rng);
            Ray ray = generate_ray(cam, u, v);
            auto fast = sampler.candidates(ray, u, v, t);
            auto brute = ray_ball_feet(ray, balls, t);
            total_candidates += fast.size();
            if (fast.size() != brute.size()) {
                ++mismatches;
                continue;
            }
            for (std::size_t i = 0; i < fast.size(); ++i)
                if (fast[i].source_index != brute[i].source_index ||
                    fast[i].raylet.t_start != brute[i].raylet.t_start) {
                    ++mismatches;
                    break;
                }
        }
        elapsed += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        total_rays += static_cast<std::size_t>(rays);
    }
    std::cout << "scenes=" << scenes << " rays=" << total_rays
              << " candidates=" << total_candidates << " mismatches=" << mismatches
              << " throughput=" << (elapsed > 0 ? static_cast<double>(total_rays) / elapsed : 0.0)
              << " rays/s\n";
    return mismatches == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"raylet distance field pipeline"};
    app.require_subcommand(1);

    RunConfig run;
    std::string config_path;
    app.add_option("--seed", run.seed, "global RNG seed");
    app.add_option("--threads", run.threads, "worker thread count");
    app.add_option("--config", config_path, "run config JSON");

    // synth
    auto* synth = app.add_subcommand("synth", "emit a synthetic scene with views");
    std::string scene_name = "sphere-in-box", encoding = "points";
    int points = 10000, views = 30, width = 160, height = 120;
    std::string synth_out = "synth_out";
    synth->add_option("--scene", scene_name, "plane|sphere|box|sphere-in-box");
    synth->add_option("--points", points);
    synth->add_option("--views", views);
    synth->add_option("--width", width);
    synth->add_option("--height", height);
    synth->add_option("--encoding", encoding, "points|gaussians");
    synth->add_option("--out", synth_out)->required();

    // train
    auto* tr = app.add_subcommand("train", "train a field on scene + views");
    std::string train_scene, train_views, train_out = "train_out";
    tr->add_option("--scene", train_scene)->required();
    tr->add_option("--views", train_views)->required();
    tr->add_option("--out", train_out)->required();
    tr->add_option("--steps", run.steps);
    tr->add_option("--batch-rays", run.batch_rays);
    tr->add_option("--lr", run.lr);
    tr->add_option("--t-train", run.t_train);
    tr->add_option("--k", run.k);
    tr->add_option("--channels", run.channels);
    tr->add_option("--blend", run.blend, "softmax|mean|alpha|sigmoid");
    tr->add_option("--neighbor-info", run.neighbor_info, "xyz|relative|both");
    tr->add_option("--feature-mode", run.feature_mode, "none|learnable-table|loaded");
    tr->add_option("--hidden", run.hidden);
    tr->add_option("--hidden-layers", run.hidden_layers);

    // render
    auto* rd = app.add_subcommand("render", "render depth/normals from a checkpoint");
    std::string ckpt, render_scene, camera_path, out_depth, out_normal, out_preview;
    rd->add_option("--checkpoint", ckpt)->required();
    rd->add_option("--scene", render_scene)->required();
    rd->add_option("--camera", camera_path)->required();
    rd->add_option("--out-depth", out_depth);
    rd->add_option("--out-normal", out_normal);
    rd->add_option("--out-preview", out_preview);
    rd->add_option("--t-test", run.t_test);

    // eval-depth
    auto* ed = app.add_subcommand("eval-depth", "compare predicted and gt depth PFMs");
    std::string pred_pfm, gt_pfm, align, depth_csv;
    ed->add_option("--pred", pred_pfm)->required();
    ed->add_option("--gt", gt_pfm)->required();
    ed->add_option("--align", align, "median-mad");
    ed->add_option("--out", depth_csv);

    // fuse
    auto* fu = app.add_subcommand("fuse", "TSDF-fuse depth views into a mesh");
    std::string fuse_views, fuse_prefix = "gt", fuse_mesh = "mesh.ply", fuse_volume;
    double voxel = 0.02;
    fu->add_option("--views", fuse_views)->required();
    fu->add_option("--prefix", fuse_prefix, "depth file prefix (default gt)");
    fu->add_option("--voxel", voxel);
    fu->add_option("--out", fuse_mesh)->required();
    fu->add_option("--out-volume", fuse_volume);

    // eval-mesh
    auto* em = app.add_subcommand("eval-mesh", "compare two meshes");
    std::string pred_mesh, gt_mesh, mesh_csv;
    int mesh_samples = 100000;
    double mesh_threshold = 0.05;
    em->add_option("--pred", pred_mesh)->required();
    em->add_option("--gt", gt_mesh)->required();
    em->add_option("--samples", mesh_samples);
    em->add_option("--threshold", mesh_threshold);
    em->add_option("--out", mesh_csv);

    // intersect-bench
    auto* ib = app.add_subcommand("intersect-bench", "sampling oracle equivalence + throughput");
    int bench_scenes = 5, bench_points = 2000, bench_rays = 200;
    ib->add_option("--scenes", bench_scenes);
    ib->add_option("--points", bench_points);
    ib->add_option("--rays", bench_rays);

    try {
        app.parse(argc, argv);
        if (!config_path.empty()) {
            RunConfig file_cfg = read_run_config(config_path);
            uint64_t seed = run.seed;
            run = file_cfg;
            if (app.count("--seed")) run.seed = seed;
        }
        if (synth->parsed())
            return cmd_synth(run, scene_name, points, views, width, height, encoding, synth_out);
        if (tr->parsed()) return cmd_train(run, train_scene, train_views, train_out);
        if (rd->parsed())
            return cmd_render(run, ckpt, render_scene, camera_path, out_depth, out_normal,
                              out_preview);
        if (ed->parsed()) return cmd_eval_depth(pred_pfm, gt_pfm, align, depth_csv);
        if (fu->parsed()) return cmd_fuse(fuse_views, fuse_prefix, voxel, fuse_mesh, fuse_volume);
        if (em->parsed())
            return cmd_eval_mesh(pred_mesh, gt_mesh, mesh_samples, mesh_threshold, run.seed,
                                 mesh_csv);
        if (ib->parsed())
            return cmd_intersect_bench(run.seed, bench_scenes, bench_points, bench_rays);
        return 1;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // 0 stays for --help, anything else is a usage error
    } catch (const InvalidParameter& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
