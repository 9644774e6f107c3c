#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hipmark/backbone/branches.hpp"
#include "hipmark/diffcore/ops.hpp"

// Mutual Modulation Fusion: each output pixel of one branch is a softmax-weighted
// average of its n x n neighbourhood, with the weights set by the similarity of
// each neighbour to the co-located pixel of the other branch.
namespace hipmark::mmf {

/// Row-major n x n window around (i, j) of a [c, h, w] map as an [n*n, c] matrix.
/// Out-of-bounds slots replicate the nearest edge pixel. Throws ConfigError for even n.
template <typename T>
std::vector<T> extract_neighborhood(const BasicTensor<T>& f, std::size_t i, std::size_t j,
                                    std::size_t n);

/// softmax over slots of sum_c center[c] * neighborhood[slot, c].
template <typename T>
std::vector<T> modulation_weights(std::span<const T> center, std::span<const T> neighborhood);

/// Differentiable core of both routes: `source` is re-weighted per pixel by
/// `guide`. Output has the shape of `source`.
template <typename T>
BasicTensor<T> cross_modulate(const BasicTensor<T>& guide, const BasicTensor<T>& source,
                              std::size_t n);

/// Per-pixel weights [n*n, h, w] used by cross_modulate (no gradient).
template <typename T>
BasicTensor<T> modulation_weight_map(const BasicTensor<T>& guide, const BasicTensor<T>& source,
                                     std::size_t n);

/// f_l' : f_l neighbourhoods weighted by similarity to the f_g centre pixel.
template <typename T>
BasicTensor<T> local_to_global_fuse(const BasicTensor<T>& f_l, const BasicTensor<T>& f_g,
                                    std::size_t n) {
    return cross_modulate(f_g, f_l, n);
}

/// f_g' : f_g neighbourhoods weighted by similarity to the f_l centre pixel.
template <typename T>
BasicTensor<T> global_to_local_fuse(const BasicTensor<T>& f_g, const BasicTensor<T>& f_l,
                                    std::size_t n) {
    return cross_modulate(f_l, f_g, n);
}

enum class FusionMode { mmf, concat };
enum class Combine { concat, sum };

FusionMode parse_fusion_mode(const std::string& name);
Combine parse_combine(const std::string& name);

struct FusionConfig {
    FusionMode mode = FusionMode::mmf;
    Combine combine = Combine::concat;
    std::size_t window = 3;
};

/// Joins f_l and f_g into f_m. In mmf mode both routes run and are either
/// concatenated and projected back to c channels with a 1x1 conv, or summed.
/// In concat mode (the w/o-MMF ablation) the raw maps go straight to the projection.
template <typename T>
class BasicFusionBlock {
   public:
    BasicFusionBlock(std::size_t channels, const FusionConfig& config, BasicParameterSet<T>& params, Rng& rng);

    BasicFeatureMap<T> forward(const BasicFeatureMap<T>& local, const BasicFeatureMap<T>& global) const;

    /// The 1x1 projection [c, 2c, 1, 1]; absent in sum mode.
    BasicConv2d<T>& projection() { return projection_; }
    const FusionConfig& config() const { return config_; }

   private:
    FusionConfig config_;
    BasicConv2d<T> projection_;
};

using FusionBlock = BasicFusionBlock<float>;

}  // namespace hipmark::mmf
