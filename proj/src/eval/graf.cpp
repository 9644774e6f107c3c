#include "hipmark/eval/graf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hipmark/error.hpp"

namespace hipmark::eval {

double line_angle_deg(Point a0, Point a1, Point b0, Point b1) {
    const double ux = a1.x - a0.x, uy = a1.y - a0.y;
    const double vx = b1.x - b0.x, vy = b1.y - b0.y;
    const double nu = std::hypot(ux, uy), nv = std::hypot(vx, vy);
    if (nu == 0.0 || nv == 0.0) throw DataError("degenerate geometry: a line is defined by two coincident points");
    // atan2 of |cross| and |dot| stays accurate near 0 and 90 degrees.
    const double cross = std::abs(ux * vy - uy * vx);
    const double dot = std::abs(ux * vx + uy * vy);
    return std::atan2(cross, dot) * 180.0 / std::numbers::pi;
}

GrafAngles graf_angles(std::span<const Point> landmarks) {
    if (landmarks.size() != kNumLandmarks) {
        throw ContractError("graf_angles: expected 6 landmarks, got " + std::to_string(landmarks.size()));
    }
    const auto& l = landmarks;
    return {line_angle_deg(l[0], l[1], l[2], l[3]), line_angle_deg(l[0], l[1], l[4], l[5])};
}

bool is_normal(const GrafAngles& angles) { return angles.alpha_deg > 60.0 && angles.beta_deg < 77.0; }

}  // namespace hipmark::eval
