#pragma once

#include <span>

#include "hipmark/sample.hpp"

namespace hipmark::eval {

struct GrafAngles {
    double alpha_deg = 0.0;  // baseline (L1, L2) vs bony roof (L3, L4)
    double beta_deg = 0.0;   // baseline (L1, L2) vs cartilage roof (L5, L6)
};

/// Angle in degrees between the undirected lines (a0, a1) and (b0, b1), in [0, 90].
/// Throws DataError if either line has coincident points.
double line_angle_deg(Point a0, Point a1, Point b0, Point b1);

GrafAngles graf_angles(std::span<const Point> landmarks);

/// Normal iff alpha > 60 and beta < 77 (strict).
bool is_normal(const GrafAngles& angles);

/// 0 = normal, 1 = abnormal.
inline int graf_label(const GrafAngles& angles) { return is_normal(angles) ? 0 : 1; }

}  // namespace hipmark::eval
