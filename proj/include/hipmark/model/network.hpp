#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "hipmark/backbone/branches.hpp"
#include "hipmark/mmf/mmf.hpp"
#include "hipmark/tgcn/tgcn.hpp"

namespace hipmark {

struct ModelConfig {
    BackboneConfig backbone;
    mmf::FusionConfig fusion;
    bool use_tgcn = true;
    tgcn::TgcnConfig tgcn;

    void validate() const;
};

/// The ablation variants: fusion strategy x presence of the TGCN subnetwork.
enum class Variant { concat_baseline, without_mmf, without_tgcn, full };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);
/// Returns `base` with fusion mode and use_tgcn set for `variant`.
ModelConfig apply_variant(ModelConfig base, Variant variant);

template <typename T>
struct BasicModelOutput {
    BasicTensor<T> icf_logits;    // [k, h_f, w_f]
    BasicTensor<T> icf_heatmaps;  // sigmoid(icf_logits)
    BasicTensor<T> refined;       // undefined without TGCN
    BasicTensor<T> class_logit;   // [1]; undefined without TGCN

    bool has_tgcn() const { return refined.defined(); }
    /// The stack landmarks are decoded from: refined when present, else the ICF heatmaps.
    const BasicTensor<T>& decode_source() const { return has_tgcn() ? refined : icf_heatmaps; }
};

/// ICF subnetwork (U-Net + transformer + fusion + heatmap head) followed by
/// the optional TGCN subnetwork.
template <typename T>
class BasicTgcnIcfNetwork {
   public:
    using Scalar = T;

    BasicTgcnIcfNetwork(const ModelConfig& config, std::uint64_t seed);
    BasicTgcnIcfNetwork(const BasicTgcnIcfNetwork&) = delete;
    BasicTgcnIcfNetwork& operator=(const BasicTgcnIcfNetwork&) = delete;

    BasicModelOutput<T> forward(const BasicTensor<T>& image) const;

    const ModelConfig& config() const { return config_; }
    BasicParameterSet<T>& parameters() { return params_; }
    const BasicParameterSet<T>& parameters() const { return params_; }

    BasicUNetBranch<T>& unet() { return *unet_; }
    BasicTransformerBranch<T>& transformer() { return *transformer_; }
    mmf::BasicFusionBlock<T>& fusion() { return *fusion_; }
    BasicHeatmapHead<T>& head() { return *head_; }
    tgcn::BasicTgcnHead<T>* tgcn() { return tgcn_.get(); }

   private:
    ModelConfig config_;
    BasicParameterSet<T> params_;
    std::unique_ptr<BasicUNetBranch<T>> unet_;
    std::unique_ptr<BasicTransformerBranch<T>> transformer_;
    std::unique_ptr<mmf::BasicFusionBlock<T>> fusion_;
    std::unique_ptr<BasicHeatmapHead<T>> head_;
    std::unique_ptr<tgcn::BasicTgcnHead<T>> tgcn_;
};

using ModelOutput = BasicModelOutput<float>;
using TgcnIcfNetwork = BasicTgcnIcfNetwork<float>;

extern template class BasicTgcnIcfNetwork<float>;
extern template class BasicTgcnIcfNetwork<double>;

}  // namespace hipmark
