#pragma once

#include <vector>

#include "hipmark/diffcore/random.hpp"
#include "hipmark/diffcore/tensor.hpp"
#include "hipmark/sample.hpp"

namespace hipmark::synth {

struct RenderOptions {
    float background = 0.1f;
    float line_level = 0.6f;
    double line_half_width = 1.0;  // px
    float blob_level = 1.0f;
    double blob_sigma = 2.0;       // px
    double speckle = 0.3;          // gamma; 0 disables noise
};

/// Noise-free intensity field: background, the three pair segments and a
/// Gaussian blob per landmark, combined by maximum. Returns [1, size, size].
Tensor render_structures(const std::vector<Point>& landmarks, std::size_t size, const RenderOptions& options = {});

/// render_structures followed by multiplicative speckle p * (1 + gamma * u),
/// u ~ U(-1, 1) drawn row-major from `rng`, clamped to [0, 1].
Tensor render_phantom(const std::vector<Point>& landmarks, Rng& rng, std::size_t size,
                      const RenderOptions& options = {});

}  // namespace hipmark::synth
