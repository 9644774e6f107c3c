#include "hipmark/eval/decode.hpp"

#include <algorithm>

#include "hipmark/error.hpp"

namespace hipmark::eval {

namespace {

// Vertex offset of the parabola through (-1, left), (0, mid), (1, right).
double parabola_offset(double left, double mid, double right) {
    const double denom = left - 2.0 * mid + right;
    if (denom >= 0.0) return 0.0;
    return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

bool DecodedLandmarks::any_degenerate() const {
    return std::any_of(degenerate.begin(), degenerate.end(), [](bool b) { return b; });
}

DecodedLandmarks decode_landmarks(const Tensor& heatmaps, double upscale) {
    if (heatmaps.ndim() != 3) {
        throw DimensionError("decode_landmarks: expected [k, h, w], got " + shape_str(heatmaps.shape()));
    }
    const std::size_t k = heatmaps.dim(0), h = heatmaps.dim(1), w = heatmaps.dim(2);
    auto data = heatmaps.data();
    DecodedLandmarks result;
    for (std::size_t ch = 0; ch < k; ++ch) {
        const float* map = data.data() + ch * h * w;
        const float* hi = std::max_element(map, map + h * w);
        const float* lo = std::min_element(map, map + h * w);
        if (*lo == *hi) {
            result.points.push_back({static_cast<double>(w / 2) * upscale, static_cast<double>(h / 2) * upscale});
            result.degenerate.push_back(true);
            continue;
        }
        const std::size_t best = static_cast<std::size_t>(hi - map);
        const std::size_t r = best / w, c = best % w;
        double x = static_cast<double>(c), y = static_cast<double>(r);
        if (c > 0 && c + 1 < w) x += parabola_offset(map[best - 1], map[best], map[best + 1]);
        if (r > 0 && r + 1 < h) y += parabola_offset(map[best - w], map[best], map[best + w]);
        result.points.push_back({x * upscale, y * upscale});
        result.degenerate.push_back(false);
    }
    return result;
}

}  // namespace hipmark::eval
