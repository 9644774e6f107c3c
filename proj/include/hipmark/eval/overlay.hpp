#pragma once

#include <filesystem>
#include <vector>

#include "hipmark/diffcore/tensor.hpp"
#include "hipmark/sample.hpp"

namespace hipmark::eval {

inline constexpr int kGroundTruthGray = 128;
inline constexpr int kPredictionGray = 255;

/// Copy of `image` ([1, h, w]) with a plus-shaped marker of the given arm
/// length at each point: ground truth at gray 128, predictions at gray 255
/// (drawn last). Image intensities are capped at 127/255 so markers stay
/// distinguishable.
Tensor burn_overlay(const Tensor& image, const std::vector<Point>& ground_truth, const std::vector<Point>& predicted,
                    int arm = 2);

void write_overlay(const std::filesystem::path& path, const Tensor& image, const std::vector<Point>& ground_truth,
                   const std::vector<Point>& predicted);

}  // namespace hipmark::eval
