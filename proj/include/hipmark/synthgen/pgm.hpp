#pragma once

#include <filesystem>

#include "hipmark/diffcore/tensor.hpp"

namespace hipmark::synth {

/// Binary P5, maxval 255. `image` is [1, h, w] or [h, w]; values are clamped
/// to [0, 1] and rounded to 8 bits.
void write_pgm(const std::filesystem::path& path, const Tensor& image);

/// Reads a binary P5 file (maxval <= 255) into [1, h, w] scaled to [0, 1].
/// Throws FormatError on anything else.
Tensor read_pgm(const std::filesystem::path& path);

}  // namespace hipmark::synth
