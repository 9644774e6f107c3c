#include "hipmark/mmf/mmf.hpp"

#include <algorithm>
#include <cmath>

#include "hipmark/error.hpp"

namespace hipmark::mmf {

namespace {

void check_window(std::size_t n) {
    if (n % 2 == 0) throw ConfigError("mmf: window size must be odd, got " + std::to_string(n));
}

template <typename T>
void check_pair(const BasicTensor<T>& a, const BasicTensor<T>& b, const char* who) {
    if (a.ndim() != 3 || a.shape() != b.shape()) {
        throw DimensionError(std::string(who) + ": feature maps must share a [c, h, w] shape, got " +
                             shape_str(a.shape()) + " and " + shape_str(b.shape()));
    }
}

std::size_t clamp_index(std::ptrdiff_t v, std::size_t size) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(v, 0, static_cast<std::ptrdiff_t>(size) - 1));
}

// Flat spatial index of each window slot for each pixel, edge-replicated.
std::vector<std::size_t> window_table(std::size_t h, std::size_t w, std::size_t n) {
    const auto r = static_cast<std::ptrdiff_t>(n / 2);
    std::vector<std::size_t> table(h * w * n * n);
    std::size_t t = 0;
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j)
            for (std::ptrdiff_t di = -r; di <= r; ++di)
                for (std::ptrdiff_t dj = -r; dj <= r; ++dj)
                    table[t++] = clamp_index(static_cast<std::ptrdiff_t>(i) + di, h) * w +
                                 clamp_index(static_cast<std::ptrdiff_t>(j) + dj, w);
    return table;
}

template <typename T>
void softmax_inplace(std::span<T> v) {
    const T mx = *std::max_element(v.begin(), v.end());
    T total = T(0);
    for (auto& x : v) {
        x = std::exp(x - mx);
        total += x;
    }
    for (auto& x : v) x /= total;
}

// Forward pass shared by cross_modulate and modulation_weight_map.
template <typename T>
void modulate(std::span<const T> guide, std::span<const T> source, std::size_t c, std::size_t hw,
              std::size_t slots, const std::vector<std::size_t>& table, std::vector<T>& weights,
              std::vector<T>* out) {
    weights.assign(hw * slots, T(0));
    for (std::size_t p = 0; p < hw; ++p) {
        const std::size_t* idx = table.data() + p * slots;
        std::span<T> w(weights.data() + p * slots, slots);
        for (std::size_t k = 0; k < slots; ++k) {
            T score = T(0);
            for (std::size_t ch = 0; ch < c; ++ch) score += guide[ch * hw + p] * source[ch * hw + idx[k]];
            w[k] = score;
        }
        softmax_inplace(w);
        if (!out) continue;
        for (std::size_t ch = 0; ch < c; ++ch) {
            T acc = T(0);
            for (std::size_t k = 0; k < slots; ++k) acc += w[k] * source[ch * hw + idx[k]];
            (*out)[ch * hw + p] = acc;
        }
    }
}

}  // namespace

template <typename T>
std::vector<T> extract_neighborhood(const BasicTensor<T>& f, std::size_t i, std::size_t j,
                                    std::size_t n) {
    check_window(n);
    if (f.ndim() != 3) throw DimensionError("extract_neighborhood: expected [c, h, w], got " + shape_str(f.shape()));
    const std::size_t c = f.dim(0), h = f.dim(1), w = f.dim(2);
    if (i >= h || j >= w) throw DimensionError("extract_neighborhood: pixel outside the map");
    const auto r = static_cast<std::ptrdiff_t>(n / 2);
    auto d = f.data();
    std::vector<T> patch;
    patch.reserve(n * n * c);
    for (std::ptrdiff_t di = -r; di <= r; ++di)
        for (std::ptrdiff_t dj = -r; dj <= r; ++dj) {
            const std::size_t y = clamp_index(static_cast<std::ptrdiff_t>(i) + di, h);
            const std::size_t x = clamp_index(static_cast<std::ptrdiff_t>(j) + dj, w);
            for (std::size_t ch = 0; ch < c; ++ch) patch.push_back(d[(ch * h + y) * w + x]);
        }
    return patch;
}

template <typename T>
std::vector<T> modulation_weights(std::span<const T> center, std::span<const T> neighborhood) {
    const std::size_t c = center.size();
    if (c == 0 || neighborhood.size() % c != 0) {
        throw DimensionError("modulation_weights: neighborhood of " + std::to_string(neighborhood.size()) +
                             " values does not match a center of " + std::to_string(c) + " channels");
    }
    std::vector<T> scores(neighborhood.size() / c, T(0));
    for (std::size_t k = 0; k < scores.size(); ++k)
        for (std::size_t ch = 0; ch < c; ++ch) scores[k] += center[ch] * neighborhood[k * c + ch];
    softmax_inplace(std::span<T>(scores));
    return scores;
}

template <typename T>
BasicTensor<T> modulation_weight_map(const BasicTensor<T>& guide, const BasicTensor<T>& source,
                                     std::size_t n) {
    check_window(n);
    check_pair(guide, source, "modulation_weight_map");
    const std::size_t c = source.dim(0), h = source.dim(1), w = source.dim(2);
    const std::size_t slots = n * n, hw = h * w;
    std::vector<T> weights;
    modulate<T>(guide.data(), source.data(), c, hw, slots, window_table(h, w, n), weights, nullptr);
    // [hw, slots] -> [slots, h, w]
    std::vector<T> out(slots * hw);
    for (std::size_t p = 0; p < hw; ++p)
        for (std::size_t k = 0; k < slots; ++k) out[k * hw + p] = weights[p * slots + k];
    return BasicTensor<T>(Shape{slots, h, w}, std::move(out));
}

template <typename T>
BasicTensor<T> cross_modulate(const BasicTensor<T>& guide, const BasicTensor<T>& source,
                              std::size_t n) {
    check_window(n);
    check_pair(guide, source, "mmf fuse");
    const std::size_t c = source.dim(0), h = source.dim(1), w = source.dim(2);
    const std::size_t slots = n * n, hw = h * w;
    auto table = window_table(h, w, n);
    std::vector<T> weights;
    std::vector<T> out(c * hw);
    modulate<T>(guide.data(), source.data(), c, hw, slots, table, weights, &out);

    auto node = std::make_shared<detail::Node<T>>();
    node->shape = source.shape();
    node->data = std::move(out);
    if (GradMode::enabled() && (guide.requires_grad() || source.requires_grad())) {
        node->requires_grad = true;
        node->op = "cross_modulate";
        node->inputs = {guide.node(), source.node()};
        node->backward_fn = [c, hw, slots, table = std::move(table),
                             weights = std::move(weights)](detail::Node<T>& self) {
            auto& g_node = *self.inputs[0];
            auto& s_node = *self.inputs[1];
            const T* guide_v = g_node.data.data();
            const T* src = s_node.data.data();
            T* dguide = g_node.requires_grad ? g_node.grad_buffer() : nullptr;
            T* dsrc = s_node.requires_grad ? s_node.grad_buffer() : nullptr;
            std::vector<T> dw(slots), ds(slots);
            for (std::size_t p = 0; p < hw; ++p) {
                const std::size_t* idx = table.data() + p * slots;
                const T* wp = weights.data() + p * slots;
                T dot = T(0);
                for (std::size_t k = 0; k < slots; ++k) {
                    T acc = T(0);
                    for (std::size_t ch = 0; ch < c; ++ch) acc += self.grad[ch * hw + p] * src[ch * hw + idx[k]];
                    dw[k] = acc;
                    dot += wp[k] * acc;
                }
                for (std::size_t k = 0; k < slots; ++k) ds[k] = wp[k] * (dw[k] - dot);
                for (std::size_t k = 0; k < slots; ++k) {
                    for (std::size_t ch = 0; ch < c; ++ch) {
                        const T sv = src[ch * hw + idx[k]];
                        if (dsrc) dsrc[ch * hw + idx[k]] += wp[k] * self.grad[ch * hw + p] + ds[k] * guide_v[ch * hw + p];
                        if (dguide) dguide[ch * hw + p] += ds[k] * sv;
                    }
                }
            }
        };
    }
    return BasicTensor<T>::from_node(std::move(node));
}

FusionMode parse_fusion_mode(const std::string& name) {
    if (name == "mmf") return FusionMode::mmf;
    if (name == "concat") return FusionMode::concat;
    throw ConfigError("unknown fusion mode '" + name + "' (expected mmf or concat)");
}

Combine parse_combine(const std::string& name) {
    if (name == "concat") return Combine::concat;
    if (name == "sum") return Combine::sum;
    throw ConfigError("unknown mmf combine '" + name + "' (expected concat or sum)");
}

template <typename T>
BasicFusionBlock<T>::BasicFusionBlock(std::size_t channels, const FusionConfig& config,
                                      BasicParameterSet<T>& params, Rng& rng)
    : config_(config) {
    check_window(config.window);
    if (config.mode == FusionMode::concat || config.combine == Combine::concat) {
        projection_ = BasicConv2d<T>(params, "fusion.project", 2 * channels, channels, 1, rng);
    }
}

template <typename T>
BasicFeatureMap<T> BasicFusionBlock<T>::forward(const BasicFeatureMap<T>& local,
                                                const BasicFeatureMap<T>& global) const {
    check_pair(local.tensor, global.tensor, "fuse");
    if (config_.mode == FusionMode::concat) {
        return {projection_.forward(concat<T>({local.tensor, global.tensor}, 0)), Branch::fused};
    }
    BasicTensor<T> local_fused = local_to_global_fuse(local.tensor, global.tensor, config_.window);
    BasicTensor<T> global_fused = global_to_local_fuse(global.tensor, local.tensor, config_.window);
    if (config_.combine == Combine::sum) return {add(local_fused, global_fused), Branch::fused};
    return {projection_.forward(concat<T>({local_fused, global_fused}, 0)), Branch::fused};
}

#define HIPMARK_INSTANTIATE_MMF(T)                                                                     \
    template std::vector<T> extract_neighborhood(const BasicTensor<T>&, std::size_t, std::size_t,      \
                                                 std::size_t);                                         \
    template std::vector<T> modulation_weights(std::span<const T>, std::span<const T>);                \
    template BasicTensor<T> cross_modulate(const BasicTensor<T>&, const BasicTensor<T>&, std::size_t); \
    template BasicTensor<T> modulation_weight_map(const BasicTensor<T>&, const BasicTensor<T>&,        \
                                                  std::size_t);

HIPMARK_INSTANTIATE_MMF(float)
HIPMARK_INSTANTIATE_MMF(double)

template class BasicFusionBlock<float>;
template class BasicFusionBlock<double>;

#undef HIPMARK_INSTANTIATE_MMF

}  // namespace hipmark::mmf
