#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "hipmark/diffcore/tensor.hpp"

// Differentiable operations. Every op is instantiated for float (training)
// and double (gradient checking).
namespace hipmark {

enum class Activation { relu, gelu, sigmoid };

/// Throws ConfigError for names other than relu, gelu, sigmoid.
Activation parse_activation(std::string_view name);

struct Conv2dOptions {
    std::size_t stride = 1;
    std::size_t pad = 0;
};

// -- elementwise / structural ---------------------------------------------

template <typename T> BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T> BasicTensor<T> sub(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T> BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T> BasicTensor<T> scale(const BasicTensor<T>& a, T factor);

/// Adds `bias` (1-D, length x.dim(axis)) broadcast along every other axis.
template <typename T>
BasicTensor<T> add_broadcast(const BasicTensor<T>& x, const BasicTensor<T>& bias, std::size_t axis);
/// Multiplies by `w` (1-D, length x.dim(axis)) broadcast along every other axis.
template <typename T>
BasicTensor<T> mul_broadcast(const BasicTensor<T>& x, const BasicTensor<T>& w, std::size_t axis);

template <typename T> BasicTensor<T> sum(const BasicTensor<T>& a);
template <typename T> BasicTensor<T> mean(const BasicTensor<T>& a);
/// Mean over one axis; the axis is removed (a 1-D input yields shape [1]).
template <typename T> BasicTensor<T> mean_axis(const BasicTensor<T>& a, std::size_t axis);

template <typename T> BasicTensor<T> reshape(const BasicTensor<T>& a, Shape shape);
template <typename T> BasicTensor<T> transpose(const BasicTensor<T>& a);
template <typename T>
BasicTensor<T> concat(const std::vector<BasicTensor<T>>& parts, std::size_t axis);
template <typename T>
BasicTensor<T> slice(const BasicTensor<T>& a, std::size_t axis, std::size_t begin, std::size_t end);

// -- linear algebra / convolution ----------------------------------------

template <typename T> BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b);

/// Cross-correlation. x: [c_in, h, w]; weight: [c_out, c_in, kh, kw];
/// bias: [c_out] or undefined.
template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& x, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias, Conv2dOptions options = {});

/// Gradient-of-conv upsampling. x: [c_in, h, w]; weight: [c_in, c_out, kh, kw];
/// output spatial dims are (h - 1) * stride + kh.
template <typename T>
BasicTensor<T> transpose_conv2d(const BasicTensor<T>& x, const BasicTensor<T>& weight,
                                const BasicTensor<T>& bias, std::size_t stride);

// -- nonlinearities / normalization --------------------------------------

template <typename T> BasicTensor<T> softmax(const BasicTensor<T>& x, std::size_t axis);
template <typename T> BasicTensor<T> activation(const BasicTensor<T>& x, Activation kind);
template <typename T> BasicTensor<T> relu(const BasicTensor<T>& x) { return activation(x, Activation::relu); }
template <typename T> BasicTensor<T> gelu(const BasicTensor<T>& x) { return activation(x, Activation::gelu); }
template <typename T> BasicTensor<T> sigmoid(const BasicTensor<T>& x) { return activation(x, Activation::sigmoid); }

/// Zero-mean, unit-variance normalization of every 1-D slice along `axis`.
template <typename T>
BasicTensor<T> layer_norm(const BasicTensor<T>& x, std::size_t axis, T eps = T(1e-5));

// -- losses ----------------------------------------------------------------

template <typename T> BasicTensor<T> mse_loss(const BasicTensor<T>& pred, const BasicTensor<T>& target);

/// Mean binary cross-entropy on logits, evaluated as
/// max(z, 0) - z*y + log(1 + exp(-|z|)). Labels must be 0 or 1.
template <typename T> BasicTensor<T> bce_loss(const BasicTensor<T>& logits, const BasicTensor<T>& labels);
template <typename T> BasicTensor<T> bce_loss(const BasicTensor<T>& logit, T label);

}  // namespace hipmark
