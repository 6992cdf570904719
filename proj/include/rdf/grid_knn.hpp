#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <unordered_map>
#include <vector>

#include "rdf/errors.hpp"
#include "rdf/vec.hpp"

namespace rdf {

inline double dist2(const Vec3& a, const Vec3& b) {
    double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

// Uniform hash grid for exact K-nearest-neighbor queries. Results match a
// linear scan bitwise: both routes compute distances with dist2() and break
// ties by ascending point index.
class PointGrid {
public:
    explicit PointGrid(std::span<const Vec3> points, double cell_size = 0.0) {
        points_.assign(points.begin(), points.end());
        if (points_.empty()) throw InvalidParameter("PointGrid: empty point set");
        Vec3 lo = points_[0], hi = points_[0];
        for (const Vec3& p : points_) {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
        }
        origin_ = lo;
        if (cell_size <= 0.0) {
            // Base the cell on the largest extent so degenerate (collinear or
            // planar) sets do not collapse to microscopic cells.
            Vec3 ext = hi - lo;
            double span = std::max({ext.x, ext.y, ext.z, 1e-9});
            cell_size = 2.0 * span / std::cbrt(static_cast<double>(points_.size()));
        }
        cell_ = cell_size;
        cells_.reserve(points_.size());
        for (std::size_t i = 0; i < points_.size(); ++i)
            cells_[cell_of(points_[i])].push_back(static_cast<int>(i));
        cell_lo_ = cell_of(lo);
        cell_hi_ = cell_of(hi);
        max_span_ = std::max({cell_hi_.x - cell_lo_.x, cell_hi_.y - cell_lo_.y,
                              cell_hi_.z - cell_lo_.z});
    }

    std::size_t size() const { return points_.size(); }
    const Vec3& point(int i) const { return points_[static_cast<std::size_t>(i)]; }

    // Exact k nearest neighbors of `query`, sorted by (distance, index).
    // exclude >= 0 removes that index from consideration. If fewer than k
    // points exist, the farthest found index is repeated to pad to k.
    std::vector<int> knn(const Vec3& query, int k, int exclude = -1) const {
        if (k < 1) throw InvalidParameter("knn: k must be >= 1");
        using Entry = std::pair<double, int>;  // (dist2, idx), max-heap on top
        std::priority_queue<Entry> heap;

        auto consider = [&](int idx) {
            if (idx == exclude) return;
            double d2 = dist2(query, points_[static_cast<std::size_t>(idx)]);
            Entry e{d2, idx};
            if (static_cast<int>(heap.size()) < k) {
                heap.push(e);
            } else if (e < heap.top()) {
                heap.pop();
                heap.push(e);
            }
        };

        Cell qc = cell_of(query);
        std::size_t usable = points_.size() - (exclude >= 0 ? 1u : 0u);
        int kq = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(k), usable));
        if (kq == 0) throw InvalidParameter("knn: no points available");

        // Rings below the box distance are empty; rings beyond the far side
        // of the occupied box cannot contain any cell of the grid.
        int64_t first_ring = chebyshev_to_box(qc);
        int64_t last_ring = first_ring + max_span_ + 1;
        for (int64_t ring = first_ring; ring <= last_ring; ++ring) {
            visit_ring(qc, ring, consider);
            if (static_cast<int>(heap.size()) >= kq) {
                // Minimum possible distance from query to the next ring.
                double ring_min = static_cast<double>(ring) * cell_ - cell_;
                if (ring_min > 0.0 && ring_min * ring_min > heap.top().first) break;
            }
        }

        std::vector<Entry> found;
        found.reserve(heap.size());
        while (!heap.empty()) {
            found.push_back(heap.top());
            heap.pop();
        }
        std::sort(found.begin(), found.end(), [](const Entry& a, const Entry& b) {
            return a.first != b.first ? a.first < b.first : a.second < b.second;
        });
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(k));
        for (const Entry& e : found) out.push_back(e.second);
        while (static_cast<int>(out.size()) < k) out.push_back(out.back());
        return out;
    }

    // Exact nearest-neighbor distance of stored point i to any other point.
    double nearest_distance(int i) const {
        std::vector<int> nn = knn(points_[static_cast<std::size_t>(i)], 1, i);
        return std::sqrt(dist2(points_[static_cast<std::size_t>(i)], points_[static_cast<std::size_t>(nn[0])]));
    }

private:
    struct Cell {
        int64_t x, y, z;
        bool operator==(const Cell&) const = default;
    };

    // Hashes may collide between distinct cells; the map key is the full
    // coordinate triple so collisions are resolved by equality.
    struct CellHash {
        std::size_t operator()(const Cell& c) const {
            uint64_t h = 1469598103934665603ull;
            for (int64_t v : {c.x, c.y, c.z}) {
                h ^= static_cast<uint64_t>(v);
                h *= 1099511628211ull;
            }
            return static_cast<std::size_t>(h);
        }
    };

    Cell cell_of(const Vec3& p) const {
        return {static_cast<int64_t>(std::floor((p.x - origin_.x) / cell_)),
                static_cast<int64_t>(std::floor((p.y - origin_.y) / cell_)),
                static_cast<int64_t>(std::floor((p.z - origin_.z) / cell_))};
    }

    // Chebyshev cell distance from a query cell to the occupied bounding box.
    int64_t chebyshev_to_box(const Cell& c) const {
        auto axis = [](int64_t v, int64_t lo, int64_t hi) {
            return v < lo ? lo - v : (v > hi ? v - hi : 0);
        };
        return std::max({axis(c.x, cell_lo_.x, cell_hi_.x), axis(c.y, cell_lo_.y, cell_hi_.y),
                         axis(c.z, cell_lo_.z, cell_hi_.z)});
    }

    template <typename F>
    void visit_ring(const Cell& c, int64_t ring, F&& f) const {
        auto visit_cell = [&](int64_t x, int64_t y, int64_t z) {
            auto it = cells_.find(Cell{x, y, z});
            if (it == cells_.end()) return;
            for (int idx : it->second) f(idx);
        };
        if (ring == 0) {
            visit_cell(c.x, c.y, c.z);
            return;
        }
        int64_t r = ring;
        // Clamp the shell to the occupied bounding box so distant queries on
        // fine grids never sweep oceans of empty coordinates.
        int64_t xlo = std::max(c.x - r, cell_lo_.x), xhi = std::min(c.x + r, cell_hi_.x);
        int64_t ylo = std::max(c.y - r, cell_lo_.y), yhi = std::min(c.y + r, cell_hi_.y);
        int64_t zlo = std::max(c.z - r, cell_lo_.z), zhi = std::min(c.z + r, cell_hi_.z);
        for (int64_t x = xlo; x <= xhi; ++x)
            for (int64_t y = ylo; y <= yhi; ++y) {
                if (std::max(std::llabs(x - c.x), std::llabs(y - c.y)) == r) {
                    for (int64_t z = zlo; z <= zhi; ++z) visit_cell(x, y, z);
                } else {
                    if (c.z - r >= zlo) visit_cell(x, y, c.z - r);
                    if (c.z + r <= zhi) visit_cell(x, y, c.z + r);
                }
            }
    }

    std::vector<Vec3> points_;
    Vec3 origin_;
    double cell_ = 1.0;
    Cell cell_lo_{0, 0, 0}, cell_hi_{0, 0, 0};
    int64_t max_span_ = 0;
    std::unordered_map<Cell, std::vector<int>, CellHash> cells_;
};

// Reference linear-scan KNN used as the test oracle and for tiny inputs.
inline std::vector<int> knn_linear(const Vec3& query, std::span<const Vec3> points, int k,
                                   int exclude = -1) {
    if (k < 1) throw InvalidParameter("knn: k must be >= 1");
    if (points.empty()) throw InvalidParameter("knn: empty point set");
    std::vector<std::pair<double, int>> all;
    all.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (static_cast<int>(i) == exclude) continue;
        all.emplace_back(dist2(query, points[i]), static_cast<int>(i));
    }
    if (all.empty()) throw InvalidParameter("knn: no points available");
    std::sort(all.begin(), all.end());
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < all.size() && static_cast<int>(i) < k; ++i) out.push_back(all[i].second);
    while (static_cast<int>(out.size()) < k) out.push_back(out.back());
    return out;
}

}  // namespace rdf
