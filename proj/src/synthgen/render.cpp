#include "hipmark/synthgen/render.hpp"

#include <algorithm>
#include <cmath>

#include "hipmark/error.hpp"

namespace hipmark::synth {

namespace {

double segment_distance(double px, double py, Point a, Point b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - a.x) * vx + (py - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (a.x + t * vx), py - (a.y + t * vy));
}

}  // namespace

Tensor render_structures(const std::vector<Point>& landmarks, std::size_t size, const RenderOptions& o) {
    if (landmarks.size() != kNumLandmarks) {
        throw ContractError("render: expected 6 landmarks, got " + std::to_string(landmarks.size()));
    }
    for (const auto& p : landmarks) {
        const double hi = static_cast<double>(size) - 1.0;
        if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= hi && p.y <= hi)) throw DataError("render: landmark outside the image");
    }
    Tensor image({1, size, size});
    auto px = image.data();
    const double two_s2 = 2.0 * o.blob_sigma * o.blob_sigma;
    for (std::size_t r = 0; r < size; ++r) {
        for (std::size_t c = 0; c < size; ++c) {
            const double x = static_cast<double>(c), y = static_cast<double>(r);
            double v = o.background;
            for (std::size_t pair = 0; pair < 3; ++pair) {
                const double d = segment_distance(x, y, landmarks[2 * pair], landmarks[2 * pair + 1]);
                // Coverage of a 1 px wide sample by a band of the given half width.
                const double coverage = std::clamp(o.line_half_width + 0.5 - d, 0.0, 1.0);
                v = std::max(v, o.line_level * coverage);
            }
            for (const auto& p : landmarks) {
                const double d2 = (x - p.x) * (x - p.x) + (y - p.y) * (y - p.y);
                v = std::max(v, o.blob_level * std::exp(-d2 / two_s2));
            }
            px[r * size + c] = static_cast<float>(v);
        }
    }
    return image;
}

Tensor render_phantom(const std::vector<Point>& landmarks, Rng& rng, std::size_t size, const RenderOptions& o) {
    Tensor image = render_structures(landmarks, size, o);
    if (o.speckle == 0.0) return image;
    for (float& v : image.data()) {
        const double u = rng.uniform(-1.0, 1.0);
        v = static_cast<float>(std::clamp(v * (1.0 + o.speckle * u), 0.0, 1.0));
    }
    return image;
}

}  // namespace hipmark::synth
