#pragma once

#include <vector>

#include "hipmark/diffcore/tensor.hpp"
#include "hipmark/sample.hpp"

namespace hipmark::eval {

struct DecodedLandmarks {
    std::vector<Point> points;     // input-scale pixel coordinates
    std::vector<bool> degenerate;  // channel was constant; point is the map centre
    bool any_degenerate() const;
};

/// Per channel: argmax (ties -> lowest row-major index), quadratic refinement
/// along each axis from the two axis neighbours, then scaling by `upscale`.
DecodedLandmarks decode_landmarks(const Tensor& heatmaps, double upscale);

}  // namespace hipmark::eval
