#pragma once

#include <string>
#include <vector>

#include "hipmark/diffcore/tensor.hpp"

namespace hipmark {

/// Pixel coordinates: x = column, y = row.
struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

inline constexpr std::size_t kNumLandmarks = 6;

struct ImageSample {
    std::string id;
    Tensor image;                  // [1, h, w], values in [0, 1]
    std::vector<Point> landmarks;  // kNumLandmarks points at input scale
    double spacing_mm = 0.1;       // mm per pixel
    int label = 0;                 // 1 = abnormal
    int group = -1;                // subject id, -1 when unknown
};

}  // namespace hipmark
