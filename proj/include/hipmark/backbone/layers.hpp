#pragma once

#include <string>

#include "hipmark/diffcore/ops.hpp"
#include "hipmark/diffcore/parameters.hpp"
#include "hipmark/diffcore/random.hpp"

namespace hipmark {

// Thin parameter holders. Weights use glorot_uniform, biases start at zero.

template <typename T>
class BasicConv2d {
   public:
    BasicConv2d() = default;
    BasicConv2d(BasicParameterSet<T>& params, const std::string& name, std::size_t in_channels,
                std::size_t out_channels, std::size_t kernel, Rng& rng, Conv2dOptions options = {});

    BasicTensor<T> forward(const BasicTensor<T>& x) const { return conv2d(x, weight_, bias_, options_); }
    BasicTensor<T>& weight() { return weight_; }
    BasicTensor<T>& bias() { return bias_; }

   private:
    BasicTensor<T> weight_;  // [out, in, k, k]
    BasicTensor<T> bias_;    // [out]
    Conv2dOptions options_;
};

template <typename T>
class BasicTransposeConv2d {
   public:
    BasicTransposeConv2d() = default;
    BasicTransposeConv2d(BasicParameterSet<T>& params, const std::string& name, std::size_t in_channels,
                         std::size_t out_channels, std::size_t kernel, std::size_t stride, Rng& rng);

    BasicTensor<T> forward(const BasicTensor<T>& x) const { return transpose_conv2d(x, weight_, bias_, stride_); }

   private:
    BasicTensor<T> weight_;  // [in, out, k, k]
    BasicTensor<T> bias_;
    std::size_t stride_ = 1;
};

/// y = x W + b for row-vector inputs x: [n, in].
template <typename T>
class BasicLinear {
   public:
    BasicLinear() = default;
    BasicLinear(BasicParameterSet<T>& params, const std::string& name, std::size_t in, std::size_t out, Rng& rng);

    BasicTensor<T> forward(const BasicTensor<T>& x) const { return add_broadcast(matmul(x, weight_), bias_, 1); }

   private:
    BasicTensor<T> weight_;  // [in, out]
    BasicTensor<T> bias_;
};

/// Normalizes each row of [n, d] and applies a learned affine map.
template <typename T>
class BasicLayerNorm {
   public:
    BasicLayerNorm() = default;
    BasicLayerNorm(BasicParameterSet<T>& params, const std::string& name, std::size_t dim);

    BasicTensor<T> forward(const BasicTensor<T>& x) const {
        return add_broadcast(mul_broadcast(layer_norm(x, 1), gamma_, 1), beta_, 1);
    }

   private:
    BasicTensor<T> gamma_;
    BasicTensor<T> beta_;
};

using Conv2d = BasicConv2d<float>;
using TransposeConv2d = BasicTransposeConv2d<float>;
using Linear = BasicLinear<float>;
using LayerNorm = BasicLayerNorm<float>;

}  // namespace hipmark
