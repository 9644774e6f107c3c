#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hipmark/diffcore/ops.hpp"
#include "hipmark/diffcore/parameters.hpp"
#include "hipmark/diffcore/random.hpp"

// Topological GCN: one graph node per landmark heatmap, one edge per pair of
// landmarks that lie on the same anatomical line.
namespace hipmark::tgcn {

/// Undirected landmark graph. Edges use 0-based landmark indices, so the hip
/// lines L1-L2, L3-L4, L5-L6 are {0,1}, {2,3}, {4,5}.
struct TopologySpec {
    std::size_t nodes = 6;
    std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {2, 3}, {4, 5}};

    /// ConfigError on out-of-range, self-loop or overlapping pairs.
    void validate() const;
};

template <typename T> BasicTensor<T> build_adjacency(const TopologySpec& spec);

/// D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I.
template <typename T> BasicTensor<T> normalize_adjacency(const BasicTensor<T>& adjacency);

/// [k, h, w] heatmaps -> [k, h*w] node features (row-major flattening).
template <typename T>
BasicTensor<T> build_node_features(const BasicTensor<T>& heatmaps, std::size_t expected_nodes);

/// Inverse of build_node_features.
template <typename T>
BasicTensor<T> unflatten_nodes(const BasicTensor<T>& nodes, std::size_t h, std::size_t w);

/// relu(A_hat * G * W). With activate = false the relu is skipped.
template <typename T>
BasicTensor<T> gcn_layer(const BasicTensor<T>& features, const BasicTensor<T>& a_hat,
                         const BasicTensor<T>& weight, bool activate = true);

/// sigmoid of the final node features, reshaped to [k, h, w].
template <typename T>
BasicTensor<T> refine_heatmaps(const BasicTensor<T>& last, std::size_t h, std::size_t w);

/// Residual form: sigmoid(icf_logits + last) reshaped to [k, h, w]. The skip keeps
/// landmarks of one pair apart; without it A_hat gives them identical rows.
template <typename T>
BasicTensor<T> refine_heatmaps(const BasicTensor<T>& last, std::size_t h, std::size_t w,
                               const BasicTensor<T>& icf_logits);

/// Per-node projection d -> d_m -> d_c (w0: [d_m, d], w1: [d_c, d_m]), then the mean
/// over nodes. Returns [d_c] logits.
template <typename T>
BasicTensor<T> classify(const BasicTensor<T>& last, const BasicTensor<T>& w0, const BasicTensor<T>& w1);

struct TgcnConfig {
    std::size_t layers = 2;
    std::size_t class_hidden = 64;  // d_m
    bool residual = true;
    TopologySpec topology;
};

template <typename T>
struct BasicTgcnOutput {
    BasicTensor<T> refined;  // [k, h, w]
    BasicTensor<T> logit;    // [1]
};

template <typename T>
class BasicTgcnHead {
   public:
    /// d = h * w of the heatmaps.
    BasicTgcnHead(std::size_t h, std::size_t w, const TgcnConfig& config, BasicParameterSet<T>& params, Rng& rng);

    /// `icf_logits` are only used in residual mode.
    BasicTgcnOutput<T> forward(const BasicTensor<T>& heatmaps, const BasicTensor<T>& icf_logits) const;

    const BasicTensor<T>& normalized_adjacency() const { return a_hat_; }
    std::vector<BasicTensor<T>>& layer_weights() { return weights_; }
    BasicTensor<T>& w0() { return w0_; }
    BasicTensor<T>& w1() { return w1_; }

   private:
    TgcnConfig config_;
    std::size_t h_, w_;
    BasicTensor<T> a_hat_;
    std::vector<BasicTensor<T>> weights_;
    BasicTensor<T> w0_;
    BasicTensor<T> w1_;
};

using TgcnOutput = BasicTgcnOutput<float>;
using TgcnHead = BasicTgcnHead<float>;

}  // namespace hipmark::tgcn
