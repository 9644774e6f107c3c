#pragma once

#include <string>
#include <vector>

#include "hipmark/diffcore/tensor.hpp"
#include "hipmark/sample.hpp"

namespace hipmark::training {

template <typename T>
struct BasicLossBreakdown {
    BasicTensor<T> objective;          // differentiable total
    double l_landmark = 0.0;
    double l_classify = 0.0;
    double lambda = 0.0;
    double total = 0.0;        // l_landmark + lambda * l_classify
};

using LossBreakdown = BasicLossBreakdown<float>;

/// Gaussian target per landmark on an h_f x w_f grid: landmark (x, y) at input
/// scale maps to (x * w_f / input_w, y * h_f / input_h). Landmarks outside
/// [0, input - 1] raise DataError naming `sample_id`.
Tensor make_gt_heatmaps(const std::vector<Point>& landmarks, double sigma, std::size_t h_f, std::size_t w_f,
                        std::size_t input_h, std::size_t input_w, const std::string& sample_id = "");

/// l_landmark = mse(icf, gt), averaged with mse(refined, gt) when `refined`
/// is defined; l_classify = bce(logit, label) when `logit` is defined, else 0.
template <typename T>
BasicLossBreakdown<T> total_loss(const BasicTensor<T>& icf_heatmaps, const BasicTensor<T>& refined_heatmaps,
                                 const BasicTensor<T>& gt_heatmaps, const BasicTensor<T>& logit, int label,
                                 double lambda);

/// Mirrors the image about the vertical axis and maps landmark x -> w - 1 - x.
ImageSample augment_hflip(const ImageSample& sample);

}  // namespace hipmark::training
