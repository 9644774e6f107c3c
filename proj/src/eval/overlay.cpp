#include "hipmark/eval/overlay.hpp"

#include <algorithm>
#include <cmath>

#include "hipmark/error.hpp"
#include "hipmark/synthgen/pgm.hpp"

namespace hipmark::eval {

namespace {

void draw_plus(std::span<float> px, long h, long w, Point p, int arm, float value) {
    const long cx = std::lround(p.x), cy = std::lround(p.y);
    for (long d = -arm; d <= arm; ++d) {
        for (auto [x, y] : {std::pair{cx + d, cy}, std::pair{cx, cy + d}}) {
            if (x >= 0 && y >= 0 && x < w && y < h) px[static_cast<std::size_t>(y * w + x)] = value;
        }
    }
}

}  // namespace

Tensor burn_overlay(const Tensor& image, const std::vector<Point>& ground_truth, const std::vector<Point>& predicted,
                    int arm) {
    if (image.ndim() != 3 || image.dim(0) != 1) {
        throw DimensionError("burn_overlay: expected [1, h, w], got " + shape_str(image.shape()));
    }
    const long h = static_cast<long>(image.dim(1)), w = static_cast<long>(image.dim(2));
    Tensor out(image.shape());
    auto src = image.data();
    auto dst = out.data();
    const float cap = 127.0f / 255.0f;
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::clamp(src[i], 0.0f, 1.0f) * cap;
    for (const auto& p : ground_truth) draw_plus(dst, h, w, p, arm, kGroundTruthGray / 255.0f);
    for (const auto& p : predicted) draw_plus(dst, h, w, p, arm, kPredictionGray / 255.0f);
    return out;
}

void write_overlay(const std::filesystem::path& path, const Tensor& image, const std::vector<Point>& ground_truth,
                   const std::vector<Point>& predicted) {
    synth::write_pgm(path, burn_overlay(image, ground_truth, predicted));
}

}  // namespace hipmark::eval
