#include "rdf/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "rdf/grid_knn.hpp"

namespace rdf {

RayMetrics ray_metrics(std::span<const double> pred, std::span<const double> gt,
                       double delta_thresh) {
    if (pred.size() != gt.size()) throw ShapeError("ray_metrics: length mismatch");
    if (pred.empty()) throw InvalidParameter("ray_metrics: empty input");
    RayMetrics m;
    m.n_samples = pred.size();
    double sum_abs = 0, sum_sq = 0, sum_abs_rel = 0, sum_sq_rel = 0;
    std::size_t within = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!(gt[i] > 0.0)) throw InvalidParameter("ray_metrics: non-positive ground truth");
        double diff = pred[i] - gt[i];
        sum_abs += std::abs(diff);
        sum_sq += diff * diff;
        sum_abs_rel += std::abs(diff) / gt[i];
        sum_sq_rel += diff * diff / gt[i];
        double ratio = std::max(pred[i] / gt[i], gt[i] / pred[i]);
        if (ratio < delta_thresh) ++within;
    }
    double inv_n = 1.0 / static_cast<double>(pred.size());
    m.ade = sum_abs * inv_n;
    m.rmse = std::sqrt(sum_sq * inv_n);
    m.abs_rel = sum_abs_rel * inv_n;
    m.sq_rel = sum_sq_rel * inv_n;
    m.delta = static_cast<double>(within) * inv_n;
    return m;
}

double median(std::span<const double> values) {
    if (values.empty()) throw InvalidParameter("median: empty input");
    std::vector<double> v(values.begin(), values.end());
    std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lo + hi);
}

double median_abs_spread(std::span<const double> values) {
    double m = median(values);
    double sum = 0;
    for (double v : values) sum += std::abs(v - m);
    return sum / static_cast<double>(values.size());
}

std::vector<double> scale_align(std::span<const double> pred, std::span<const double> gt) {
    if (pred.size() != gt.size()) throw ShapeError("scale_align: length mismatch");
    if (pred.empty()) throw InvalidParameter("scale_align: empty input");
    double m_pred = median(pred), m_gt = median(gt);
    double s_pred = median_abs_spread(pred), s_gt = median_abs_spread(gt);
    if (!(s_pred > 0.0)) throw DegenerateInput("scale_align: constant prediction (zero spread)");
    std::vector<double> out(pred.size());
    double scale = s_gt / s_pred;
    for (std::size_t i = 0; i < pred.size(); ++i) out[i] = (pred[i] - m_pred) * scale + m_gt;
    return out;
}

namespace {

struct DirectedStats {
    double mean_dist = 0;    // accuracy or completion
    double mean_absdot = 0;  // normal accuracy or completion
    double frac_within = 0;  // precision or recall
};

DirectedStats directed(const SurfaceSamples& from, const SurfaceSamples& to, double threshold) {
    PointGrid grid(to.points);
    DirectedStats st;
    double sum_d = 0, sum_n = 0;
    std::size_t within = 0;
    for (std::size_t i = 0; i < from.points.size(); ++i) {
        int nn = grid.knn(from.points[i], 1)[0];
        double d = std::sqrt(dist2(from.points[i], to.points[static_cast<std::size_t>(nn)]));
        sum_d += d;
        sum_n += std::abs(dot(from.normals[i], to.normals[static_cast<std::size_t>(nn)]));
        if (d < threshold) ++within;
    }
    double inv_n = 1.0 / static_cast<double>(from.points.size());
    st.mean_dist = sum_d * inv_n;
    st.mean_absdot = sum_n * inv_n;
    st.frac_within = static_cast<double>(within) * inv_n;
    return st;
}

}  // namespace

MeshMetrics sample_metrics(const SurfaceSamples& pred, const SurfaceSamples& gt,
                           double threshold) {
    if (pred.points.empty() || gt.points.empty())
        throw DegenerateInput("sample_metrics: empty sample set");
    DirectedStats p2g = directed(pred, gt, threshold);  // pred -> gt
    DirectedStats g2p = directed(gt, pred, threshold);  // gt -> pred
    MeshMetrics m;
    m.threshold = threshold;
    m.accuracy = p2g.mean_dist;
    m.completion = g2p.mean_dist;
    m.chamfer_l1 = (m.accuracy + m.completion) / 2.0;
    m.normal_accuracy = p2g.mean_absdot;
    m.normal_completion = g2p.mean_absdot;
    m.normal_consistency = (m.normal_accuracy + m.normal_completion) / 2.0;
    m.precision = p2g.frac_within;
    m.recall = g2p.frac_within;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

MeshMetrics mesh_metrics(const TriangleMesh& pred, const TriangleMesh& gt, int n_samples,
                         double threshold, uint64_t seed) {
    if (pred.empty() || gt.empty()) throw DegenerateInput("mesh_metrics: empty mesh");
    if (n_samples < 1) throw InvalidParameter("mesh_metrics: n_samples must be >= 1");
    // Same seed on both sides: identical meshes yield identical samples, so
    // self-comparison is exactly zero.
    SurfaceSamples ps = sample_mesh_surface(pred, n_samples, seed);
    SurfaceSamples gs = sample_mesh_surface(gt, n_samples, seed);
    return sample_metrics(ps, gs, threshold);
}

}  // namespace rdf
