#include "hipmark/model/network.hpp"

#include "hipmark/error.hpp"

namespace hipmark {

void ModelConfig::validate() const {
    backbone.validate();
    if (fusion.window % 2 == 0) throw ConfigError("mmf_window must be odd");
    if (use_tgcn) {
        tgcn.topology.validate();
        if (tgcn.topology.nodes != backbone.num_landmarks) {
            throw ConfigError("tgcn topology has " + std::to_string(tgcn.topology.nodes) +
                              " nodes but the model predicts " +
                              std::to_string(backbone.num_landmarks) + " landmarks");
        }
        if (tgcn.layers == 0) throw ConfigError("gcn_layers must be positive");
        if (tgcn.class_hidden == 0) throw ConfigError("class_hidden must be positive");
    }
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::concat_baseline: return "concat_baseline";
        case Variant::without_mmf: return "wo_mmf";
        case Variant::without_tgcn: return "wo_tgcn";
        case Variant::full: return "full";
    }
    return "unknown";
}

Variant parse_variant(const std::string& name) {
    for (auto v : {Variant::concat_baseline, Variant::without_mmf, Variant::without_tgcn, Variant::full})
        if (name == variant_name(v)) return v;
    throw ConfigError("unknown variant '" + name + "'");
}

ModelConfig apply_variant(ModelConfig base, Variant variant) {
    const bool mmf_on = variant == Variant::full || variant == Variant::without_tgcn;
    const bool tgcn_on = variant == Variant::full || variant == Variant::without_mmf;
    base.fusion.mode = mmf_on ? mmf::FusionMode::mmf : mmf::FusionMode::concat;
    base.use_tgcn = tgcn_on;
    return base;
}

template <typename T>
BasicTgcnIcfNetwork<T>::BasicTgcnIcfNetwork(const ModelConfig& config, std::uint64_t seed) : config_(config) {
    config.validate();
    Rng rng(seed);
    unet_ = std::make_unique<BasicUNetBranch<T>>(config.backbone, params_, rng);
    transformer_ = std::make_unique<BasicTransformerBranch<T>>(config.backbone, params_, rng);
    fusion_ = std::make_unique<mmf::BasicFusionBlock<T>>(config.backbone.channels, config.fusion, params_, rng);
    head_ = std::make_unique<BasicHeatmapHead<T>>(config.backbone, params_, rng);
    if (config.use_tgcn) {
        tgcn_ = std::make_unique<tgcn::BasicTgcnHead<T>>(config.backbone.feature_size, config.backbone.feature_size,
                                                         config.tgcn, params_, rng);
    }
}

template <typename T>
BasicModelOutput<T> BasicTgcnIcfNetwork<T>::forward(const BasicTensor<T>& image) const {
    BasicFeatureMap<T> local = unet_->forward(image);
    BasicFeatureMap<T> global = transformer_->forward(image);
    BasicFeatureMap<T> fused = fusion_->forward(local, global);
    BasicModelOutput<T> out;
    out.icf_logits = head_->logits(fused);
    out.icf_heatmaps = sigmoid(out.icf_logits);
    if (tgcn_) {
        auto t = tgcn_->forward(out.icf_heatmaps, out.icf_logits);
        out.refined = t.refined;
        out.class_logit = t.logit;
    }
    return out;
}

template class BasicTgcnIcfNetwork<float>;
template class BasicTgcnIcfNetwork<double>;

}  // namespace hipmark
