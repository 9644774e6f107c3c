#include "hipmark/training/loss.hpp"

#include <cmath>

#include <fmt/format.h>

#include "hipmark/diffcore/ops.hpp"
#include "hipmark/error.hpp"

namespace hipmark::training {

Tensor make_gt_heatmaps(const std::vector<Point>& landmarks, double sigma, std::size_t h_f, std::size_t w_f,
                        std::size_t input_h, std::size_t input_w, const std::string& sample_id) {
    if (!(sigma > 0.0)) throw ConfigError("heatmap sigma must be positive");
    if (h_f == 0 || w_f == 0 || input_h == 0 || input_w == 0) throw DimensionError("make_gt_heatmaps: empty grid");
    const double sx = static_cast<double>(w_f) / static_cast<double>(input_w);
    const double sy = static_cast<double>(h_f) / static_cast<double>(input_h);
    Tensor out({landmarks.size(), h_f, w_f});
    auto px = out.data();
    const double two_s2 = 2.0 * sigma * sigma;
    for (std::size_t k = 0; k < landmarks.size(); ++k) {
        const Point p = landmarks[k];
        if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= static_cast<double>(input_w - 1) &&
              p.y <= static_cast<double>(input_h - 1))) {
            throw DataError(fmt::format("sample '{}': landmark {} at ({}, {}) lies outside the {}x{} image", sample_id,
                                        k + 1, p.x, p.y, input_w, input_h));
        }
        const double cx = p.x * sx, cy = p.y * sy;
        for (std::size_t r = 0; r < h_f; ++r) {
            const double dy = static_cast<double>(r) - cy;
            for (std::size_t c = 0; c < w_f; ++c) {
                const double dx = static_cast<double>(c) - cx;
                px[(k * h_f + r) * w_f + c] = static_cast<float>(std::exp(-(dx * dx + dy * dy) / two_s2));
            }
        }
    }
    return out;
}

template <typename T>
BasicLossBreakdown<T> total_loss(const BasicTensor<T>& icf_heatmaps, const BasicTensor<T>& refined_heatmaps,
                                 const BasicTensor<T>& gt_heatmaps, const BasicTensor<T>& logit, int label,
                                 double lambda) {
    if (lambda < 0.0) throw ConfigError("lambda must be non-negative");
    if (icf_heatmaps.shape() != gt_heatmaps.shape()) {
        throw DimensionError("total_loss: heatmaps " + shape_str(icf_heatmaps.shape()) + " vs targets " +
                             shape_str(gt_heatmaps.shape()));
    }
    BasicTensor<T> landmark = mse_loss(icf_heatmaps, gt_heatmaps);
    if (refined_heatmaps.defined()) {
        if (refined_heatmaps.shape() != gt_heatmaps.shape()) {
            throw DimensionError("total_loss: refined heatmaps " + shape_str(refined_heatmaps.shape()) +
                                 " vs targets " + shape_str(gt_heatmaps.shape()));
        }
        landmark = scale(add(landmark, mse_loss(refined_heatmaps, gt_heatmaps)), T(0.5));
    }
    BasicLossBreakdown<T> out;
    out.lambda = lambda;
    out.l_landmark = landmark.item();
    out.objective = landmark;
    if (logit.defined()) {
        BasicTensor<T> classify = bce_loss(logit, static_cast<T>(label));
        out.l_classify = classify.item();
        out.objective = add(landmark, scale(classify, static_cast<T>(lambda)));
    }
    out.total = out.l_landmark + lambda * out.l_classify;
    return out;
}

template BasicLossBreakdown<float> total_loss(const Tensor&, const Tensor&, const Tensor&, const Tensor&, int,
                                              double);
template BasicLossBreakdown<double> total_loss(const Tensor64&, const Tensor64&, const Tensor64&, const Tensor64&,
                                               int, double);

ImageSample augment_hflip(const ImageSample& sample) {
    const Tensor& src = sample.image;
    if (src.ndim() != 3) throw DimensionError("augment_hflip: expected [c, h, w], got " + shape_str(src.shape()));
    const std::size_t c = src.dim(0), h = src.dim(1), w = src.dim(2);
    ImageSample out = sample;
    out.image = Tensor(src.shape());
    auto in = src.data();
    auto dst = out.image.data();
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t r = 0; r < h; ++r)
            for (std::size_t x = 0; x < w; ++x) dst[(ch * h + r) * w + x] = in[(ch * h + r) * w + (w - 1 - x)];
    for (auto& p : out.landmarks) p.x = static_cast<double>(w - 1) - p.x;
    return out;
}

}  // namespace hipmark::training
