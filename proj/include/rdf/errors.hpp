#pragma once

#include <stdexcept>
#include <string>

namespace rdf {

// Invalid arguments / configuration supplied by the caller.
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or truncated input files.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor / feature width mismatches.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerically degenerate geometry (singular covariance, zero radii, ...).
struct DegenerateInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rdf
