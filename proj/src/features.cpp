#include "rdf/features.hpp"

namespace rdf {

void assemble_feature(const Raylet& raylet, const PointGrid& grid, const PerPointFeatures& feats,
                      const FeatureLayout& layout, RayletFeature& out) {
    if (layout.k < 1) throw InvalidParameter("assemble_feature: K must be >= 1");
    if (feats.mode != FeatureMode::None && feats.channels != layout.channels)
        throw ShapeError("assemble_feature: feature channel count does not match layout");
    if (feats.mode == FeatureMode::None && layout.channels != 0)
        throw ShapeError("assemble_feature: layout expects channels but features are absent");

    out.neighbors = grid.knn(raylet.start, layout.k);
    out.values.resize(static_cast<std::size_t>(layout.input_width()));
    fill_raylet_input<float>(
        raylet.start, raylet.direction, out.neighbors,
        [&](int idx) { return grid.point(idx); },
        layout.channels > 0 ? feats.values.data() : nullptr, layout, out.values.data());
}

}  // namespace rdf
