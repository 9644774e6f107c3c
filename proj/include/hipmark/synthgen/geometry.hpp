#pragma once

#include <string>
#include <vector>

#include "hipmark/diffcore/random.hpp"
#include "hipmark/eval/graf.hpp"
#include "hipmark/sample.hpp"

namespace hipmark::synth {

enum class ClassRequest { normal, abnormal, any };

ClassRequest parse_class_request(const std::string& name);

/// Construction parameters of one phantom, in pixels at the given image size.
/// The baseline runs upward from the pivot; both roof lines leave the pivot
/// downward, the bony roof on the -x side at alpha and the cartilage roof on
/// the +x side at beta, measured from the baseline.
struct GeometryParams {
    Point pivot;
    double tilt_deg = 0.0;  // rotation of the whole construction, clockwise on screen
    double alpha_deg = 65.0;
    double beta_deg = 70.0;
    double baseline_far = 42.0;   // pivot -> L1
    double baseline_near = 15.0;  // pivot -> L2
    double roof_near = 10.0;      // pivot -> L3
    double roof_far = 34.0;       // pivot -> L4
    double cartilage_near = 10.0; // pivot -> L5
    double cartilage_far = 30.0;  // pivot -> L6
};

struct Geometry {
    std::vector<Point> landmarks;  // L1..L6
    eval::GrafAngles angles;       // construction angles
    int label = 0;                 // 1 = abnormal
};

Geometry geometry_from_params(const GeometryParams& params);

/// True when every landmark is at least `margin` px from each border of a size x size image.
bool within_margin(const std::vector<Point>& landmarks, double size, double margin);

inline constexpr int kRejectionBudget = 1000;

/// Rejection-samples alpha in [50, 75], beta in [55, 90], segment lengths and
/// placement until the requested class holds and all points keep a 10 px
/// margin. Throws GenerationError when the budget is exhausted.
Geometry sample_geometry(ClassRequest request, Rng& rng, std::size_t size = 128, double margin = 10.0);

}  // namespace hipmark::synth
