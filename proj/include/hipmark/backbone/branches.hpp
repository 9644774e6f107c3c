#pragma once

#include <vector>

#include "hipmark/backbone/config.hpp"
#include "hipmark/backbone/layers.hpp"

namespace hipmark {

enum class Branch { local, global, fused };

/// c x h_f x w_f map tagged with the branch that produced it.
template <typename T>
struct BasicFeatureMap {
    BasicTensor<T> tensor;
    Branch branch = Branch::local;
};

/// Encoder-decoder with skip connections; the decoder stops at the heatmap
/// resolution instead of climbing back to the input size.
template <typename T>
class BasicUNetBranch {
   public:
    BasicUNetBranch(const BackboneConfig& config, BasicParameterSet<T>& params, Rng& rng);

    /// image: [1, input, input] -> FeatureMap(local) of [c, h_f, w_f].
    BasicFeatureMap<T> forward(const BasicTensor<T>& image) const;

   private:
    struct Stage {
        BasicConv2d<T> first;
        BasicConv2d<T> second;
    };
    BackboneConfig config_;
    std::vector<Stage> encoder_;
    std::vector<BasicConv2d<T>> down_;
    Stage bottleneck_;
    std::vector<BasicTransposeConv2d<T>> up_;
    std::vector<Stage> decoder_;
    BasicConv2d<T> project_;
};

/// Softmax attention maps captured during a forward pass, one [N, N] per layer and head.
template <typename T>
struct BasicAttentionTrace {
    std::vector<BasicTensor<T>> weights;
};

/// Patch-token transformer. No class token; tokens are laid back onto their
/// grid and upsampled to the feature resolution.
template <typename T>
class BasicTransformerBranch {
   public:
    BasicTransformerBranch(const BackboneConfig& config, BasicParameterSet<T>& params, Rng& rng);

    BasicFeatureMap<T> forward(const BasicTensor<T>& image, BasicAttentionTrace<T>* trace = nullptr) const;
    /// Token outputs before the grid upsampling: [N, token_dim], N = (input / patch)^2,
    /// row-major over the patch grid.
    BasicTensor<T> tokens(const BasicTensor<T>& image, BasicAttentionTrace<T>* trace = nullptr) const;

    BasicTensor<T>& position_embedding() { return position_; }

   private:
    struct Block {
        BasicLayerNorm<T> norm1;
        BasicLinear<T> qkv;
        BasicLinear<T> proj;
        BasicLayerNorm<T> norm2;
        BasicLinear<T> fc1;
        BasicLinear<T> fc2;
    };
    BasicTensor<T> attention(const Block& block, const BasicTensor<T>& x, BasicAttentionTrace<T>* trace) const;

    BackboneConfig config_;
    BasicConv2d<T> patch_embed_;
    BasicTensor<T> position_;
    std::vector<Block> blocks_;
    BasicLayerNorm<T> final_norm_;
    BasicTransposeConv2d<T> upsample_;
    BasicConv2d<T> pointwise_;  // used instead of upsample_ when the grid already matches h_f
};

/// 1x1 conv to one channel per landmark.
template <typename T>
class BasicHeatmapHead {
   public:
    BasicHeatmapHead(const BackboneConfig& config, BasicParameterSet<T>& params, Rng& rng);

    /// Pre-sigmoid scores [k, h_f, w_f].
    BasicTensor<T> logits(const BasicFeatureMap<T>& fused) const;
    /// sigmoid(logits): values in (0, 1).
    BasicTensor<T> forward(const BasicFeatureMap<T>& fused) const { return sigmoid(logits(fused)); }

    BasicConv2d<T>& conv() { return conv_; }

   private:
    BasicConv2d<T> conv_;
};

using FeatureMap = BasicFeatureMap<float>;
using UNetBranch = BasicUNetBranch<float>;
using AttentionTrace = BasicAttentionTrace<float>;
using TransformerBranch = BasicTransformerBranch<float>;
using HeatmapHead = BasicHeatmapHead<float>;

}  // namespace hipmark
