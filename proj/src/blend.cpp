#include "rdf/blend.hpp"

namespace rdf {

const char* blend_mode_name(BlendMode mode) {
    switch (mode) {
        case BlendMode::Softmax: return "softmax";
        case BlendMode::Mean: return "mean";
        case BlendMode::Alpha: return "alpha";
        case BlendMode::Sigmoid: return "sigmoid";
    }
    return "softmax";
}

BlendMode blend_mode_from_name(const std::string& name) {
    if (name == "softmax") return BlendMode::Softmax;
    if (name == "mean") return BlendMode::Mean;
    if (name == "alpha") return BlendMode::Alpha;
    if (name == "sigmoid") return BlendMode::Sigmoid;
    throw InvalidParameter("unknown blend mode: " + name);
}

}  // namespace rdf
