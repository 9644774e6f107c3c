#include "hipmark/diffcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "gemm.hpp"
#include "hipmark/error.hpp"

namespace hipmark {

namespace {

template <typename T>
using Node = detail::Node<T>;

template <typename T>
BasicTensor<T> make_op(const char* op, Shape shape, std::vector<T> data,
                       std::initializer_list<const BasicTensor<T>*> inputs,
                       std::function<void(Node<T>&)> backward_fn) {
    auto node = std::make_shared<Node<T>>();
    node->shape = std::move(shape);
    node->data = std::move(data);
    bool needs_grad = false;
    if (GradMode::enabled()) {
        for (const auto* in : inputs) needs_grad = needs_grad || in->requires_grad();
    }
    if (needs_grad) {
        node->requires_grad = true;
        node->op = op;
        for (const auto* in : inputs) node->inputs.push_back(in->node());
        node->backward_fn = std::move(backward_fn);
    }
    return BasicTensor<T>::from_node(std::move(node));
}

template <typename T>
BasicTensor<T> make_op_n(const char* op, Shape shape, std::vector<T> data,
                         const std::vector<BasicTensor<T>>& inputs,
                         std::function<void(Node<T>&)> backward_fn) {
    auto node = std::make_shared<Node<T>>();
    node->shape = std::move(shape);
    node->data = std::move(data);
    bool needs_grad = false;
    if (GradMode::enabled()) {
        for (const auto& in : inputs) needs_grad = needs_grad || in.requires_grad();
    }
    if (needs_grad) {
        node->requires_grad = true;
        node->op = op;
        for (const auto& in : inputs) node->inputs.push_back(in.node());
        node->backward_fn = std::move(backward_fn);
    }
    return BasicTensor<T>::from_node(std::move(node));
}

void require_same_shape(const char* op, const Shape& a, const Shape& b) {
    if (a != b) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " +
                             shape_str(b));
    }
}

struct AxisSplit {
    std::size_t outer = 1;
    std::size_t len = 1;
    std::size_t inner = 1;
};

AxisSplit split_axis(const Shape& shape, std::size_t axis, const char* op) {
    if (axis >= shape.size()) {
        throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                             " out of range for " + shape_str(shape));
    }
    AxisSplit s;
    for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
    s.len = shape[axis];
    for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
    return s;
}

// cols[(c*kh + ki)*kw + kj][oy*ow + ox] = img[c][oy*stride - pad + ki][ox*stride - pad + kj]
template <typename T>
void im2col(const T* img, std::size_t channels, std::size_t h, std::size_t w, std::size_t kh,
            std::size_t kw, std::size_t stride, std::size_t pad, std::size_t oh, std::size_t ow,
            T* cols) {
    const std::size_t n = oh * ow;
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t ki = 0; ki < kh; ++ki) {
            for (std::size_t kj = 0; kj < kw; ++kj) {
                T* row = cols + ((c * kh + ki) * kw + kj) * n;
                for (std::size_t oy = 0; oy < oh; ++oy) {
                    const auto iy = static_cast<std::ptrdiff_t>(oy * stride + ki) -
                                    static_cast<std::ptrdiff_t>(pad);
                    T* out = row + oy * ow;
                    if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) {
                        std::fill(out, out + ow, T(0));
                        continue;
                    }
                    const T* src = img + (c * h + static_cast<std::size_t>(iy)) * w;
                    for (std::size_t ox = 0; ox < ow; ++ox) {
                        const auto ix = static_cast<std::ptrdiff_t>(ox * stride + kj) -
                                        static_cast<std::ptrdiff_t>(pad);
                        out[ox] = (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w))
                                      ? T(0)
                                      : src[static_cast<std::size_t>(ix)];
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatter-adds columns back into the image.
template <typename T>
void col2im(const T* cols, std::size_t channels, std::size_t h, std::size_t w, std::size_t kh,
            std::size_t kw, std::size_t stride, std::size_t pad, std::size_t oh, std::size_t ow,
            T* img) {
    const std::size_t n = oh * ow;
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t ki = 0; ki < kh; ++ki) {
            for (std::size_t kj = 0; kj < kw; ++kj) {
                const T* row = cols + ((c * kh + ki) * kw + kj) * n;
                for (std::size_t oy = 0; oy < oh; ++oy) {
                    const auto iy = static_cast<std::ptrdiff_t>(oy * stride + ki) -
                                    static_cast<std::ptrdiff_t>(pad);
                    if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
                    T* dst = img + (c * h + static_cast<std::size_t>(iy)) * w;
                    const T* in = row + oy * ow;
                    for (std::size_t ox = 0; ox < ow; ++ox) {
                        const auto ix = static_cast<std::ptrdiff_t>(ox * stride + kj) -
                                        static_cast<std::ptrdiff_t>(pad);
                        if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
                        dst[static_cast<std::size_t>(ix)] += in[ox];
                    }
                }
            }
        }
    }
}

template <typename T>
T sigmoid_scalar(T x) {
    if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
    const T e = std::exp(x);
    return e / (T(1) + e);
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

}  // namespace

Activation parse_activation(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "gelu") return Activation::gelu;
    if (name == "sigmoid") return Activation::sigmoid;
    throw ConfigError("unknown activation '" + std::string(name) + "'");
}

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b) {
    require_same_shape("add", a.shape(), b.shape());
    std::vector<T> out(a.numel());
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = da[i] + db[i];
    return make_op<T>("add", a.shape(), std::move(out), {&a, &b}, [](Node<T>& self) {
        for (auto& in : self.inputs) {
            if (!in->requires_grad) continue;
            T* g = in->grad_buffer();
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
        }
    });
}

template <typename T>
BasicTensor<T> sub(const BasicTensor<T>& a, const BasicTensor<T>& b) {
    require_same_shape("sub", a.shape(), b.shape());
    std::vector<T> out(a.numel());
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = da[i] - db[i];
    return make_op<T>("sub", a.shape(), std::move(out), {&a, &b}, [](Node<T>& self) {
        const T sign[2] = {T(1), T(-1)};
        for (std::size_t k = 0; k < 2; ++k) {
            auto& in = self.inputs[k];
            if (!in->requires_grad) continue;
            T* g = in->grad_buffer();
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += sign[k] * self.grad[i];
        }
    });
}

template <typename T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
    require_same_shape("mul", a.shape(), b.shape());
    std::vector<T> out(a.numel());
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = da[i] * db[i];
    return make_op<T>("mul", a.shape(), std::move(out), {&a, &b}, [](Node<T>& self) {
        auto& x = *self.inputs[0];
        auto& y = *self.inputs[1];
        if (x.requires_grad) {
            T* g = x.grad_buffer();
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * y.data[i];
        }
        if (y.requires_grad) {
            T* g = y.grad_buffer();
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * x.data[i];
        }
    });
}

template <typename T>
BasicTensor<T> scale(const BasicTensor<T>& a, T factor) {
    std::vector<T> out(a.data().begin(), a.data().end());
    for (auto& v : out) v *= factor;
    return make_op<T>("scale", a.shape(), std::move(out), {&a}, [factor](Node<T>& self) {
        T* g = self.inputs[0]->grad_buffer();
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += factor * self.grad[i];
    });
}

template <typename T>
BasicTensor<T> add_broadcast(const BasicTensor<T>& x, const BasicTensor<T>& bias, std::size_t axis) {
    const auto s = split_axis(x.shape(), axis, "add_broadcast");
    if (bias.ndim() != 1 || bias.dim(0) != s.len) {
        throw DimensionError("add_broadcast: bias " + shape_str(bias.shape()) +
                             " does not match axis " + std::to_string(axis) + " of " +
                             shape_str(x.shape()));
    }
    std::vector<T> out(x.data().begin(), x.data().end());
    auto b = bias.data();
    for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t l = 0; l < s.len; ++l)
            for (std::size_t i = 0; i < s.inner; ++i) out[(o * s.len + l) * s.inner + i] += b[l];
    return make_op<T>("add_broadcast", x.shape(), std::move(out), {&x, &bias},
                      [s](Node<T>& self) {
                          if (self.inputs[0]->requires_grad) {
                              T* g = self.inputs[0]->grad_buffer();
                              for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
                          }
                          if (self.inputs[1]->requires_grad) {
                              T* g = self.inputs[1]->grad_buffer();
                              for (std::size_t o = 0; o < s.outer; ++o)
                                  for (std::size_t l = 0; l < s.len; ++l)
                                      for (std::size_t i = 0; i < s.inner; ++i)
                                          g[l] += self.grad[(o * s.len + l) * s.inner + i];
                          }
                      });
}

template <typename T>
BasicTensor<T> mul_broadcast(const BasicTensor<T>& x, const BasicTensor<T>& w, std::size_t axis) {
    const auto s = split_axis(x.shape(), axis, "mul_broadcast");
    if (w.ndim() != 1 || w.dim(0) != s.len) {
        throw DimensionError("mul_broadcast: weights " + shape_str(w.shape()) +
                             " do not match axis " + std::to_string(axis) + " of " +
                             shape_str(x.shape()));
    }
    std::vector<T> out(x.data().begin(), x.data().end());
    auto wv = w.data();
    for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t l = 0; l < s.len; ++l)
            for (std::size_t i = 0; i < s.inner; ++i) out[(o * s.len + l) * s.inner + i] *= wv[l];
    return make_op<T>("mul_broadcast", x.shape(), std::move(out), {&x, &w}, [s](Node<T>& self) {
        auto& xin = *self.inputs[0];
        auto& win = *self.inputs[1];
        T* gx = xin.requires_grad ? xin.grad_buffer() : nullptr;
        T* gw = win.requires_grad ? win.grad_buffer() : nullptr;
        for (std::size_t o = 0; o < s.outer; ++o)
            for (std::size_t l = 0; l < s.len; ++l)
                for (std::size_t i = 0; i < s.inner; ++i) {
                    const std::size_t idx = (o * s.len + l) * s.inner + i;
                    if (gx) gx[idx] += self.grad[idx] * win.data[l];
                    if (gw) gw[l] += self.grad[idx] * xin.data[idx];
                }
    });
}

template <typename T>
BasicTensor<T> sum(const BasicTensor<T>& a) {
    auto d = a.data();
    T total = std::accumulate(d.begin(), d.end(), T(0));
    return make_op<T>("sum", Shape{1}, {total}, {&a}, [](Node<T>& self) {
        T* g = self.inputs[0]->grad_buffer();
        const std::size_t n = self.inputs[0]->data.size();
        for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[0];
    });
}

template <typename T>
BasicTensor<T> mean(const BasicTensor<T>& a) {
    auto d = a.data();
    const T inv = T(1) / static_cast<T>(d.size());
    T total = std::accumulate(d.begin(), d.end(), T(0));
    return make_op<T>("mean", Shape{1}, {total * inv}, {&a}, [inv](Node<T>& self) {
        T* g = self.inputs[0]->grad_buffer();
        const std::size_t n = self.inputs[0]->data.size();
        for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[0] * inv;
    });
}

template <typename T>
BasicTensor<T> mean_axis(const BasicTensor<T>& a, std::size_t axis) {
    const auto s = split_axis(a.shape(), axis, "mean_axis");
    Shape out_shape;
    for (std::size_t i = 0; i < a.ndim(); ++i)
        if (i != axis) out_shape.push_back(a.shape()[i]);
    if (out_shape.empty()) out_shape.push_back(1);
    std::vector<T> out(s.outer * s.inner, T(0));
    auto d = a.data();
    const T inv = T(1) / static_cast<T>(s.len);
    for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t l = 0; l < s.len; ++l)
            for (std::size_t i = 0; i < s.inner; ++i)
                out[o * s.inner + i] += d[(o * s.len + l) * s.inner + i];
    for (auto& v : out) v *= inv;
    return make_op<T>("mean_axis", std::move(out_shape), std::move(out), {&a},
                      [s, inv](Node<T>& self) {
                          T* g = self.inputs[0]->grad_buffer();
                          for (std::size_t o = 0; o < s.outer; ++o)
                              for (std::size_t l = 0; l < s.len; ++l)
                                  for (std::size_t i = 0; i < s.inner; ++i)
                                      g[(o * s.len + l) * s.inner + i] +=
                                          self.grad[o * s.inner + i] * inv;
                      });
}

template <typename T>
BasicTensor<T> reshape(const BasicTensor<T>& a, Shape shape) {
    if (shape_numel(shape) != a.numel()) {
        throw DimensionError("reshape: cannot view " + shape_str(a.shape()) + " as " +
                             shape_str(shape));
    }
    std::vector<T> out(a.data().begin(), a.data().end());
    return make_op<T>("reshape", std::move(shape), std::move(out), {&a}, [](Node<T>& self) {
        T* g = self.inputs[0]->grad_buffer();
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    });
}

template <typename T>
BasicTensor<T> transpose(const BasicTensor<T>& a) {
    if (a.ndim() != 2) throw DimensionError("transpose: expected 2-D, got " + shape_str(a.shape()));
    const std::size_t rows = a.dim(0), cols = a.dim(1);
    std::vector<T> out(a.numel());
    auto d = a.data();
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out[c * rows + r] = d[r * cols + c];
    return make_op<T>("transpose", Shape{cols, rows}, std::move(out), {&a},
                      [rows, cols](Node<T>& self) {
                          T* g = self.inputs[0]->grad_buffer();
                          for (std::size_t r = 0; r < rows; ++r)
                              for (std::size_t c = 0; c < cols; ++c)
                                  g[r * cols + c] += self.grad[c * rows + r];
                      });
}

template <typename T>
BasicTensor<T> concat(const std::vector<BasicTensor<T>>& parts, std::size_t axis) {
    if (parts.empty()) throw ContractError("concat: no inputs");
    const Shape& first = parts[0].shape();
    std::vector<AxisSplit> splits;
    std::size_t total_len = 0;
    for (const auto& p : parts) {
        const Shape& s = p.shape();
        bool ok = s.size() == first.size();
        for (std::size_t i = 0; ok && i < s.size(); ++i) ok = (i == axis) || s[i] == first[i];
        if (!ok) {
            throw DimensionError("concat: shape mismatch " + shape_str(first) + " vs " +
                                 shape_str(s) + " along axis " + std::to_string(axis));
        }
        splits.push_back(split_axis(s, axis, "concat"));
        total_len += splits.back().len;
    }
    Shape out_shape = first;
    out_shape[axis] = total_len;
    const std::size_t outer = splits[0].outer, inner = splits[0].inner;
    std::vector<T> out(shape_numel(out_shape));
    std::size_t offset = 0;
    std::vector<std::size_t> offsets;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        offsets.push_back(offset);
        auto d = parts[k].data();
        const std::size_t len = splits[k].len;
        for (std::size_t o = 0; o < outer; ++o)
            std::copy_n(d.begin() + o * len * inner, len * inner,
                        out.begin() + (o * total_len + offset) * inner);
        offset += len;
    }
    return make_op_n<T>("concat", std::move(out_shape), std::move(out), parts,
                        [splits, offsets, outer, inner, total_len](Node<T>& self) {
                            for (std::size_t k = 0; k < self.inputs.size(); ++k) {
                                auto& in = *self.inputs[k];
                                if (!in.requires_grad) continue;
                                T* g = in.grad_buffer();
                                const std::size_t len = splits[k].len;
                                for (std::size_t o = 0; o < outer; ++o) {
                                    const T* src =
                                        self.grad.data() + (o * total_len + offsets[k]) * inner;
                                    T* dst = g + o * len * inner;
                                    for (std::size_t i = 0; i < len * inner; ++i) dst[i] += src[i];
                                }
                            }
                        });
}

template <typename T>
BasicTensor<T> slice(const BasicTensor<T>& a, std::size_t axis, std::size_t begin, std::size_t end) {
    const auto s = split_axis(a.shape(), axis, "slice");
    if (begin >= end || end > s.len) {
        throw DimensionError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                             ") invalid for axis " + std::to_string(axis) + " of " +
                             shape_str(a.shape()));
    }
    const std::size_t len = end - begin;
    Shape out_shape = a.shape();
    out_shape[axis] = len;
    std::vector<T> out(s.outer * len * s.inner);
    auto d = a.data();
    for (std::size_t o = 0; o < s.outer; ++o)
        std::copy_n(d.begin() + (o * s.len + begin) * s.inner, len * s.inner,
                    out.begin() + o * len * s.inner);
    return make_op<T>("slice", std::move(out_shape), std::move(out), {&a},
                      [s, begin, len](Node<T>& self) {
                          T* g = self.inputs[0]->grad_buffer();
                          for (std::size_t o = 0; o < s.outer; ++o) {
                              T* dst = g + (o * s.len + begin) * s.inner;
                              const T* src = self.grad.data() + o * len * s.inner;
                              for (std::size_t i = 0; i < len * s.inner; ++i) dst[i] += src[i];
                          }
                      });
}

template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
    if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(0)) {
        throw DimensionError("matmul: incompatible shapes " + shape_str(a.shape()) + " and " +
                             shape_str(b.shape()));
    }
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    std::vector<T> out(m * n);
    detail::gemm(false, false, m, n, k, T(1), a.data().data(), b.data().data(), T(0), out.data());
    return make_op<T>("matmul", Shape{m, n}, std::move(out), {&a, &b}, [m, k, n](Node<T>& self) {
        auto& x = *self.inputs[0];
        auto& y = *self.inputs[1];
        // da = dc * b^T ; db = a^T * dc
        if (x.requires_grad)
            detail::gemm(false, true, m, k, n, T(1), self.grad.data(), y.data.data(), T(1),
                         x.grad_buffer());
        if (y.requires_grad)
            detail::gemm(true, false, k, n, m, T(1), x.data.data(), self.grad.data(), T(1),
                         y.grad_buffer());
    });
}

template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& x, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias, Conv2dOptions options) {
    if (x.ndim() != 3 || weight.ndim() != 4 || weight.dim(1) != x.dim(0)) {
        throw DimensionError("conv2d: input " + shape_str(x.shape()) +
                             " incompatible with kernels " + shape_str(weight.shape()));
    }
    if (options.stride == 0) throw ConfigError("conv2d: stride must be positive");
    const std::size_t cin = x.dim(0), h = x.dim(1), w = x.dim(2);
    const std::size_t cout = weight.dim(0), kh = weight.dim(2), kw = weight.dim(3);
    const std::size_t pad = options.pad, stride = options.stride;
    if (kh > h + 2 * pad || kw > w + 2 * pad) {
        throw DimensionError("conv2d: kernel " + shape_str(weight.shape()) +
                             " larger than padded input " + shape_str(x.shape()) + " (pad " +
                             std::to_string(pad) + ")");
    }
    if (bias.defined() && (bias.ndim() != 1 || bias.dim(0) != cout)) {
        throw DimensionError("conv2d: bias " + shape_str(bias.shape()) + " for " +
                             std::to_string(cout) + " output channels");
    }
    const std::size_t oh = (h + 2 * pad - kh) / stride + 1;
    const std::size_t ow = (w + 2 * pad - kw) / stride + 1;
    const std::size_t kdim = cin * kh * kw, n = oh * ow;
    const bool pointwise = kh == 1 && kw == 1 && stride == 1 && pad == 0;

    std::vector<T> cols;
    if (!pointwise) {
        cols.resize(kdim * n);
        im2col(x.data().data(), cin, h, w, kh, kw, stride, pad, oh, ow, cols.data());
    }
    const T* cols_ptr = pointwise ? x.data().data() : cols.data();
    std::vector<T> out(cout * n);
    detail::gemm(false, false, cout, n, kdim, T(1), weight.data().data(), cols_ptr, T(0), out.data());
    if (bias.defined()) {
        auto b = bias.data();
        for (std::size_t co = 0; co < cout; ++co)
            for (std::size_t i = 0; i < n; ++i) out[co * n + i] += b[co];
    }

    BasicTensor<T> bias_or_weight = bias.defined() ? bias : weight;
    const bool has_bias = bias.defined();
    return make_op<T>(
        "conv2d", Shape{cout, oh, ow}, std::move(out), {&x, &weight, &bias_or_weight},
        [=, cols = std::move(cols)](Node<T>& self) {
            auto& xin = *self.inputs[0];
            auto& win = *self.inputs[1];
            const T* saved_cols = pointwise ? xin.data.data() : cols.data();
            if (win.requires_grad)
                detail::gemm(false, true, cout, kdim, n, T(1), self.grad.data(), saved_cols, T(1),
                             win.grad_buffer());
            if (has_bias && self.inputs[2]->requires_grad) {
                T* gb = self.inputs[2]->grad_buffer();
                for (std::size_t co = 0; co < cout; ++co) {
                    T acc = T(0);
                    for (std::size_t i = 0; i < n; ++i) acc += self.grad[co * n + i];
                    gb[co] += acc;
                }
            }
            if (xin.requires_grad) {
                if (pointwise) {
                    detail::gemm(true, false, kdim, n, cout, T(1), win.data.data(),
                                 self.grad.data(), T(1), xin.grad_buffer());
                } else {
                    std::vector<T> dcols(kdim * n);
                    detail::gemm(true, false, kdim, n, cout, T(1), win.data.data(),
                                 self.grad.data(), T(0), dcols.data());
                    col2im(dcols.data(), cin, h, w, kh, kw, stride, pad, oh, ow,
                           xin.grad_buffer());
                }
            }
        });
}

template <typename T>
BasicTensor<T> transpose_conv2d(const BasicTensor<T>& x, const BasicTensor<T>& weight,
                                const BasicTensor<T>& bias, std::size_t stride) {
    if (x.ndim() != 3 || weight.ndim() != 4 || weight.dim(0) != x.dim(0)) {
        throw DimensionError("transpose_conv2d: input " + shape_str(x.shape()) +
                             " incompatible with kernels " + shape_str(weight.shape()));
    }
    if (stride == 0) throw ConfigError("transpose_conv2d: stride must be positive");
    const std::size_t cin = x.dim(0), h = x.dim(1), w = x.dim(2);
    const std::size_t cout = weight.dim(1), kh = weight.dim(2), kw = weight.dim(3);
    if (bias.defined() && (bias.ndim() != 1 || bias.dim(0) != cout)) {
        throw DimensionError("transpose_conv2d: bias " + shape_str(bias.shape()) + " for " +
                             std::to_string(cout) + " output channels");
    }
    const std::size_t oh = (h - 1) * stride + kh, ow = (w - 1) * stride + kw;
    const std::size_t kdim = cout * kh * kw, n = h * w;

    std::vector<T> cols(kdim * n);
    detail::gemm(true, false, kdim, n, cin, T(1), weight.data().data(), x.data().data(), T(0),
                 cols.data());
    std::vector<T> out(cout * oh * ow, T(0));
    col2im(cols.data(), cout, oh, ow, kh, kw, stride, 0, h, w, out.data());
    if (bias.defined()) {
        auto b = bias.data();
        for (std::size_t co = 0; co < cout; ++co)
            for (std::size_t i = 0; i < oh * ow; ++i) out[co * oh * ow + i] += b[co];
    }

    BasicTensor<T> bias_or_weight = bias.defined() ? bias : weight;
    const bool has_bias = bias.defined();
    return make_op<T>(
        "transpose_conv2d", Shape{cout, oh, ow}, std::move(out), {&x, &weight, &bias_or_weight},
        [=](Node<T>& self) {
            auto& xin = *self.inputs[0];
            auto& win = *self.inputs[1];
            std::vector<T> dcols(kdim * n);
            im2col(self.grad.data(), cout, oh, ow, kh, kw, stride, 0, h, w, dcols.data());
            if (xin.requires_grad)
                detail::gemm(false, false, cin, n, kdim, T(1), win.data.data(), dcols.data(), T(1),
                             xin.grad_buffer());
            if (win.requires_grad)
                detail::gemm(false, true, cin, kdim, n, T(1), xin.data.data(), dcols.data(), T(1),
                             win.grad_buffer());
            if (has_bias && self.inputs[2]->requires_grad) {
                T* gb = self.inputs[2]->grad_buffer();
                for (std::size_t co = 0; co < cout; ++co) {
                    T acc = T(0);
                    for (std::size_t i = 0; i < oh * ow; ++i) acc += self.grad[co * oh * ow + i];
                    gb[co] += acc;
                }
            }
        });
}

template <typename T>
BasicTensor<T> softmax(const BasicTensor<T>& x, std::size_t axis) {
    const auto s = split_axis(x.shape(), axis, "softmax");
    std::vector<T> out(x.numel());
    auto d = x.data();
    for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t i = 0; i < s.inner; ++i) {
            const std::size_t base = o * s.len * s.inner + i;
            T mx = d[base];
            for (std::size_t l = 1; l < s.len; ++l) mx = std::max(mx, d[base + l * s.inner]);
            T total = T(0);
            for (std::size_t l = 0; l < s.len; ++l) {
                const T e = std::exp(d[base + l * s.inner] - mx);
                out[base + l * s.inner] = e;
                total += e;
            }
            for (std::size_t l = 0; l < s.len; ++l) out[base + l * s.inner] /= total;
        }
    return make_op<T>("softmax", x.shape(), out, {&x}, [s, y = out](Node<T>& self) {
        T* g = self.inputs[0]->grad_buffer();
        for (std::size_t o = 0; o < s.outer; ++o)
            for (std::size_t i = 0; i < s.inner; ++i) {
                const std::size_t base = o * s.len * s.inner + i;
                T dot = T(0);
                for (std::size_t l = 0; l < s.len; ++l)
                    dot += self.grad[base + l * s.inner] * y[base + l * s.inner];
                for (std::size_t l = 0; l < s.len; ++l) {
                    const std::size_t idx = base + l * s.inner;
                    g[idx] += y[idx] * (self.grad[idx] - dot);
                }
            }
    });
}

template <typename T>
BasicTensor<T> activation(const BasicTensor<T>& x, Activation kind) {
    auto d = x.data();
    std::vector<T> out(d.size());
    switch (kind) {
        case Activation::relu:
            for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i] > T(0) ? d[i] : T(0);
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < d.size(); ++i) out[i] = sigmoid_scalar(d[i]);
            break;
        case Activation::gelu:
            for (std::size_t i = 0; i < d.size(); ++i) {
                const T v = d[i];
                const T t = std::tanh(T(kGeluC) * (v + T(kGeluA) * v * v * v));
                out[i] = T(0.5) * v * (T(1) + t);
            }
            break;
    }
    const char* name = kind == Activation::relu ? "relu" : kind == Activation::gelu ? "gelu" : "sigmoid";
    auto result_copy = kind == Activation::sigmoid ? out : std::vector<T>{};
    return make_op<T>(name, x.shape(), std::move(out), {&x},
                      [kind, y = std::move(result_copy)](Node<T>& self) {
                          auto& in = *self.inputs[0];
                          T* g = in.grad_buffer();
                          const std::size_t n = self.grad.size();
                          switch (kind) {
                              case Activation::relu:
                                  for (std::size_t i = 0; i < n; ++i)
                                      if (in.data[i] > T(0)) g[i] += self.grad[i];
                                  break;
                              case Activation::sigmoid:
                                  for (std::size_t i = 0; i < n; ++i)
                                      g[i] += self.grad[i] * y[i] * (T(1) - y[i]);
                                  break;
                              case Activation::gelu:
                                  for (std::size_t i = 0; i < n; ++i) {
                                      const T v = in.data[i];
                                      const T u = T(kGeluC) * (v + T(kGeluA) * v * v * v);
                                      const T t = std::tanh(u);
                                      const T du = T(kGeluC) * (T(1) + T(3 * kGeluA) * v * v);
                                      const T dydx =
                                          T(0.5) * (T(1) + t) + T(0.5) * v * (T(1) - t * t) * du;
                                      g[i] += self.grad[i] * dydx;
                                  }
                                  break;
                          }
                      });
}

template <typename T>
BasicTensor<T> layer_norm(const BasicTensor<T>& x, std::size_t axis, T eps) {
    const auto s = split_axis(x.shape(), axis, "layer_norm");
    auto d = x.data();
    std::vector<T> out(d.size());
    std::vector<T> inv_std(s.outer * s.inner);
    const T inv_len = T(1) / static_cast<T>(s.len);
    for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t i = 0; i < s.inner; ++i) {
            const std::size_t base = o * s.len * s.inner + i;
            T mu = T(0);
            for (std::size_t l = 0; l < s.len; ++l) mu += d[base + l * s.inner];
            mu *= inv_len;
            T var = T(0);
            for (std::size_t l = 0; l < s.len; ++l) {
                const T c = d[base + l * s.inner] - mu;
                var += c * c;
            }
            var *= inv_len;
            const T r = T(1) / std::sqrt(var + eps);
            inv_std[o * s.inner + i] = r;
            for (std::size_t l = 0; l < s.len; ++l)
                out[base + l * s.inner] = (d[base + l * s.inner] - mu) * r;
        }
    return make_op<T>(
        "layer_norm", x.shape(), out, {&x},
        [s, inv_len, y = out, inv_std = std::move(inv_std)](Node<T>& self) {
            T* g = self.inputs[0]->grad_buffer();
            for (std::size_t o = 0; o < s.outer; ++o)
                for (std::size_t i = 0; i < s.inner; ++i) {
                    const std::size_t base = o * s.len * s.inner + i;
                    T mean_g = T(0), mean_gy = T(0);
                    for (std::size_t l = 0; l < s.len; ++l) {
                        const std::size_t idx = base + l * s.inner;
                        mean_g += self.grad[idx];
                        mean_gy += self.grad[idx] * y[idx];
                    }
                    mean_g *= inv_len;
                    mean_gy *= inv_len;
                    const T r = inv_std[o * s.inner + i];
                    for (std::size_t l = 0; l < s.len; ++l) {
                        const std::size_t idx = base + l * s.inner;
                        g[idx] += r * (self.grad[idx] - mean_g - y[idx] * mean_gy);
                    }
                }
        });
}

template <typename T>
BasicTensor<T> mse_loss(const BasicTensor<T>& pred, const BasicTensor<T>& target) {
    require_same_shape("mse_loss", pred.shape(), target.shape());
    auto p = pred.data();
    auto t = target.data();
    T total = T(0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const T diff = p[i] - t[i];
        total += diff * diff;
    }
    const T inv = T(1) / static_cast<T>(p.size());
    return make_op<T>("mse_loss", Shape{1}, {total * inv}, {&pred, &target},
                      [inv](Node<T>& self) {
                          auto& a = *self.inputs[0];
                          auto& b = *self.inputs[1];
                          const T k = T(2) * inv * self.grad[0];
                          if (a.requires_grad) {
                              T* g = a.grad_buffer();
                              for (std::size_t i = 0; i < a.data.size(); ++i)
                                  g[i] += k * (a.data[i] - b.data[i]);
                          }
                          if (b.requires_grad) {
                              T* g = b.grad_buffer();
                              for (std::size_t i = 0; i < b.data.size(); ++i)
                                  g[i] -= k * (a.data[i] - b.data[i]);
                          }
                      });
}

template <typename T>
BasicTensor<T> bce_loss(const BasicTensor<T>& logits, const BasicTensor<T>& labels) {
    require_same_shape("bce_loss", logits.shape(), labels.shape());
    auto z = logits.data();
    auto y = labels.data();
    T total = T(0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (y[i] != T(0) && y[i] != T(1)) {
            throw ContractError("bce_loss: label must be 0 or 1, got " + std::to_string(y[i]));
        }
        total += std::max(z[i], T(0)) - z[i] * y[i] + std::log1p(std::exp(-std::abs(z[i])));
    }
    const T inv = T(1) / static_cast<T>(z.size());
    return make_op<T>("bce_loss", Shape{1}, {total * inv}, {&logits, &labels},
                      [inv](Node<T>& self) {
                          auto& zn = *self.inputs[0];
                          auto& yn = *self.inputs[1];
                          if (!zn.requires_grad) return;
                          T* g = zn.grad_buffer();
                          for (std::size_t i = 0; i < zn.data.size(); ++i)
                              g[i] += self.grad[0] * inv * (sigmoid_scalar(zn.data[i]) - yn.data[i]);
                      });
}

template <typename T>
BasicTensor<T> bce_loss(const BasicTensor<T>& logit, T label) {
    return bce_loss(logit, BasicTensor<T>::full(logit.shape(), label));
}

#define HIPMARK_INSTANTIATE_OPS(T)                                                              \
    template BasicTensor<T> add(const BasicTensor<T>&, const BasicTensor<T>&);                  \
    template BasicTensor<T> sub(const BasicTensor<T>&, const BasicTensor<T>&);                  \
    template BasicTensor<T> mul(const BasicTensor<T>&, const BasicTensor<T>&);                  \
    template BasicTensor<T> scale(const BasicTensor<T>&, T);                                    \
    template BasicTensor<T> add_broadcast(const BasicTensor<T>&, const BasicTensor<T>&,         \
                                          std::size_t);                                         \
    template BasicTensor<T> mul_broadcast(const BasicTensor<T>&, const BasicTensor<T>&,         \
                                          std::size_t);                                         \
    template BasicTensor<T> sum(const BasicTensor<T>&);                                         \
    template BasicTensor<T> mean(const BasicTensor<T>&);                                        \
    template BasicTensor<T> mean_axis(const BasicTensor<T>&, std::size_t);                      \
    template BasicTensor<T> reshape(const BasicTensor<T>&, Shape);                              \
    template BasicTensor<T> transpose(const BasicTensor<T>&);                                   \
    template BasicTensor<T> concat(const std::vector<BasicTensor<T>>&, std::size_t);            \
    template BasicTensor<T> slice(const BasicTensor<T>&, std::size_t, std::size_t, std::size_t); \
    template BasicTensor<T> matmul(const BasicTensor<T>&, const BasicTensor<T>&);               \
    template BasicTensor<T> conv2d(const BasicTensor<T>&, const BasicTensor<T>&,                \
                                   const BasicTensor<T>&, Conv2dOptions);                       \
    template BasicTensor<T> transpose_conv2d(const BasicTensor<T>&, const BasicTensor<T>&,      \
                                             const BasicTensor<T>&, std::size_t);               \
    template BasicTensor<T> softmax(const BasicTensor<T>&, std::size_t);                        \
    template BasicTensor<T> activation(const BasicTensor<T>&, Activation);                      \
    template BasicTensor<T> layer_norm(const BasicTensor<T>&, std::size_t, T);                  \
    template BasicTensor<T> mse_loss(const BasicTensor<T>&, const BasicTensor<T>&);             \
    template BasicTensor<T> bce_loss(const BasicTensor<T>&, const BasicTensor<T>&);             \
    template BasicTensor<T> bce_loss(const BasicTensor<T>&, T);

HIPMARK_INSTANTIATE_OPS(float)
HIPMARK_INSTANTIATE_OPS(double)

#undef HIPMARK_INSTANTIATE_OPS

}  // namespace hipmark
