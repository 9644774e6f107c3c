#include "hipmark/synthgen/geometry.hpp"

#include <cmath>
#include <numbers>

#include "hipmark/error.hpp"

namespace hipmark::synth {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Screen coordinates (y down): rotate v by `deg`, clockwise as displayed.
Point rotate(Point v, double deg) {
    const double c = std::cos(deg * kDeg), s = std::sin(deg * kDeg);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Point along(Point origin, Point dir, double length) { return {origin.x + dir.x * length, origin.y + dir.y * length}; }

}  // namespace

ClassRequest parse_class_request(const std::string& name) {
    if (name == "normal") return ClassRequest::normal;
    if (name == "abnormal") return ClassRequest::abnormal;
    if (name == "any") return ClassRequest::any;
    throw ConfigError("unknown class request '" + name + "' (normal, abnormal, any)");
}

Geometry geometry_from_params(const GeometryParams& p) {
    const Point up = rotate({0.0, -1.0}, p.tilt_deg);
    const Point down = rotate({0.0, 1.0}, p.tilt_deg);
    const Point roof_dir = rotate(down, p.alpha_deg);
    const Point cartilage_dir = rotate(down, -p.beta_deg);
    Geometry g;
    g.landmarks = {
        along(p.pivot, up, p.baseline_far),         along(p.pivot, up, p.baseline_near),
        along(p.pivot, roof_dir, p.roof_near),      along(p.pivot, roof_dir, p.roof_far),
        along(p.pivot, cartilage_dir, p.cartilage_near), along(p.pivot, cartilage_dir, p.cartilage_far),
    };
    g.angles = {p.alpha_deg, p.beta_deg};
    g.label = eval::graf_label(g.angles);
    return g;
}

bool within_margin(const std::vector<Point>& landmarks, double size, double margin) {
    for (const auto& q : landmarks) {
        if (q.x < margin || q.y < margin || q.x > size - 1.0 - margin || q.y > size - 1.0 - margin) return false;
    }
    return true;
}

Geometry sample_geometry(ClassRequest request, Rng& rng, std::size_t size, double margin) {
    const double s = static_cast<double>(size) / 128.0;
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
        GeometryParams p;
        p.pivot = {rng.uniform(56.0, 72.0) * s, rng.uniform(58.0, 70.0) * s};
        p.tilt_deg = rng.uniform(-5.0, 5.0);
        p.alpha_deg = rng.uniform(50.0, 75.0);
        p.beta_deg = rng.uniform(55.0, 90.0);
        p.baseline_far = rng.uniform(38.0, 46.0) * s;
        p.baseline_near = rng.uniform(12.0, 18.0) * s;
        p.roof_near = rng.uniform(8.0, 12.0) * s;
        p.roof_far = rng.uniform(30.0, 38.0) * s;
        p.cartilage_near = rng.uniform(8.0, 12.0) * s;
        p.cartilage_far = rng.uniform(26.0, 34.0) * s;
        Geometry g = geometry_from_params(p);
        const bool class_ok = request == ClassRequest::any || (request == ClassRequest::abnormal) == (g.label == 1);
        if (class_ok && within_margin(g.landmarks, static_cast<double>(size), margin)) return g;
    }
    throw GenerationError("sample_geometry: rejection budget of " + std::to_string(kRejectionBudget) +
                          " draws exhausted");
}

}  // namespace hipmark::synth
