#pragma once
// Independent reference implementations used by the unit and acceptance suites.
// Everything here is written as plain loops over raw buffers and never calls the
// library routine it is checking.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hipmark/diffcore/random.hpp"
#include "hipmark/diffcore/tensor.hpp"
#include "hipmark/sample.hpp"

namespace oracle {

using hipmark::BasicTensor;
using hipmark::Point;
using hipmark::Rng;
using hipmark::Shape;

template <typename T>
BasicTensor<T> random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0, bool requires_grad = true) {
    BasicTensor<T> t(std::move(shape), requires_grad);
    for (auto& v : t.data()) v = static_cast<T>(rng.uniform(lo, hi));
    return t;
}

/// max |g - fd| / max(max|g|, max|fd|, tiny) over one tensor.
inline double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
        scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
    }
    return diff / std::max(scale, 1e-30);
}

struct GradCheck {
    std::vector<double> per_tensor;  // relative error per input
    double worst() const { return per_tensor.empty() ? 0.0 : *std::max_element(per_tensor.begin(), per_tensor.end()); }
};

/// Central differences of a scalar-valued function with respect to every element
/// of every input.
template <typename T>
std::vector<std::vector<double>> finite_differences(std::vector<BasicTensor<T>> inputs,
                                                    const std::function<BasicTensor<T>()>& loss, double h) {
    hipmark::NoGradGuard no_grad;
    std::vector<std::vector<double>> out;
    for (auto& x : inputs) {
        std::vector<double> numeric(x.numel(), 0.0);
        auto d = x.data();
        for (std::size_t i = 0; i < d.size(); ++i) {
            const T saved = d[i];
            d[i] = static_cast<T>(saved + h);
            const double up = static_cast<double>(loss().item());
            d[i] = static_cast<T>(saved - h);
            const double down = static_cast<double>(loss().item());
            d[i] = saved;
            numeric[i] = (up - down) / (2.0 * h);
        }
        out.push_back(std::move(numeric));
    }
    return out;
}

/// finite_differences compared with the tape gradient, per input.
template <typename T>
GradCheck check_gradients(std::vector<BasicTensor<T>> inputs,
                          const std::function<BasicTensor<T>()>& loss, double h) {
    for (auto& x : inputs) x.zero_grad();
    loss().backward();
    const auto numeric = finite_differences<T>(inputs, loss, h);
    GradCheck out;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        std::vector<double> analytic(inputs[k].numel(), 0.0);
        if (inputs[k].has_grad()) {
            auto g = inputs[k].grad();
            for (std::size_t i = 0; i < g.size(); ++i) analytic[i] = g[i];
        }
        out.per_tensor.push_back(relative_error(analytic, numeric[k]));
    }
    return out;
}

// -- MMF ----------------------------------------------------------------------

/// Per-pixel loop form of the fusion: every output pixel of `source` is the
/// softmax(guide-centre . neighbour)-weighted sum of its n x n replicated window.
template <typename T>
std::vector<double> mmf_reference(const BasicTensor<T>& guide, const BasicTensor<T>& source, std::size_t n) {
    const std::size_t c = source.dim(0), h = source.dim(1), w = source.dim(2);
    const auto g = guide.data();
    const auto s = source.data();
    const long r = static_cast<long>(n / 2);
    std::vector<double> out(c * h * w, 0.0);
    auto at = [&](std::span<const T> buf, std::size_t ch, long i, long j) {
        i = std::clamp(i, 0L, static_cast<long>(h) - 1);
        j = std::clamp(j, 0L, static_cast<long>(w) - 1);
        return static_cast<double>(buf[(ch * h + static_cast<std::size_t>(i)) * w + static_cast<std::size_t>(j)]);
    };
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            std::vector<double> score;
            for (long di = -r; di <= r; ++di) {
                for (long dj = -r; dj <= r; ++dj) {
                    double acc = 0.0;
                    for (std::size_t ch = 0; ch < c; ++ch) {
                        acc += at(g, ch, static_cast<long>(i), static_cast<long>(j)) *
                               at(s, ch, static_cast<long>(i) + di, static_cast<long>(j) + dj);
                    }
                    score.push_back(acc);
                }
            }
            const double top = *std::max_element(score.begin(), score.end());
            double z = 0.0;
            for (auto& v : score) z += (v = std::exp(v - top));
            std::size_t slot = 0;
            for (long di = -r; di <= r; ++di) {
                for (long dj = -r; dj <= r; ++dj, ++slot) {
                    for (std::size_t ch = 0; ch < c; ++ch) {
                        out[(ch * h + i) * w + j] +=
                            score[slot] / z * at(s, ch, static_cast<long>(i) + di, static_cast<long>(j) + dj);
                    }
                }
            }
        }
    }
    return out;
}

// -- graph ----------------------------------------------------------------------

/// D^-1/2 (A + I) D^-1/2 evaluated entry by entry.
inline std::vector<double> normalized_adjacency(const std::vector<double>& a, std::size_t k) {
    std::vector<double> deg(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) deg[i] += a[i * k + j] + (i == j ? 1.0 : 0.0);
    }
    std::vector<double> out(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            out[i * k + j] = (a[i * k + j] + (i == j ? 1.0 : 0.0)) / std::sqrt(deg[i] * deg[j]);
        }
    }
    return out;
}

/// Mean over nodes of w1 * (w0 * g_i); w0: [dm, d], w1: [dc, dm].
inline std::vector<double> classify_reference(const std::vector<double>& g, std::size_t k, std::size_t d,
                                              const std::vector<double>& w0, std::size_t dm,
                                              const std::vector<double>& w1, std::size_t dc) {
    std::vector<double> out(dc, 0.0);
    for (std::size_t node = 0; node < k; ++node) {
        std::vector<double> hidden(dm, 0.0);
        for (std::size_t m = 0; m < dm; ++m) {
            for (std::size_t t = 0; t < d; ++t) hidden[m] += w0[m * d + t] * g[node * d + t];
        }
        for (std::size_t q = 0; q < dc; ++q) {
            for (std::size_t m = 0; m < dm; ++m) out[q] += w1[q * dm + m] * hidden[m] / static_cast<double>(k);
        }
    }
    return out;
}

// -- metrics ----------------------------------------------------------------------

inline double mre_loop(const std::vector<Point>& pred, const std::vector<Point>& gt, double spacing) {
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double dx = pred[i].x - gt[i].x, dy = pred[i].y - gt[i].y;
        total += std::sqrt(dx * dx + dy * dy) * spacing;
    }
    return total / static_cast<double>(pred.size());
}

inline double sdr_loop(const std::vector<double>& distances, double threshold) {
    std::size_t hits = 0;
    for (double d : distances) {
        if (d <= threshold) ++hits;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(distances.size());
}

}  // namespace oracle
