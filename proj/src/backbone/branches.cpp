#include "hipmark/backbone/branches.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "hipmark/error.hpp"

namespace hipmark {

namespace {

template <typename T>
void check_image(const BasicTensor<T>& image, const BackboneConfig& config, const char* who) {
    const Shape expected{1, config.input_size, config.input_size};
    if (image.shape() != expected) {
        throw DimensionError(std::string(who) + ": expected image " + shape_str(expected) +
                             ", got " + shape_str(image.shape()));
    }
}

constexpr Conv2dOptions kSame3x3{1, 1};

}  // namespace

template <typename T>
BasicUNetBranch<T>::BasicUNetBranch(const BackboneConfig& config, BasicParameterSet<T>& params, Rng& rng)
    : config_(config) {
    config.validate();
    const std::size_t depth = config.unet_depth;
    auto width = [&](std::size_t level) { return config.unet_base_channels << level; };

    std::size_t in = 1;
    for (std::size_t l = 0; l < depth; ++l) {
        const std::string p = "unet.enc" + std::to_string(l);
        encoder_.push_back({BasicConv2d<T>(params, p + ".conv1", in, width(l), 3, rng, kSame3x3),
                            BasicConv2d<T>(params, p + ".conv2", width(l), width(l), 3, rng, kSame3x3)});
        down_.emplace_back(params, p + ".down", width(l), width(l), 2, rng, Conv2dOptions{2, 0});
        in = width(l);
    }
    bottleneck_ = {BasicConv2d<T>(params, "unet.mid.conv1", in, width(depth), 3, rng, kSame3x3),
                   BasicConv2d<T>(params, "unet.mid.conv2", width(depth), width(depth), 3, rng, kSame3x3)};

    const std::size_t stop = static_cast<std::size_t>(std::countr_zero(config.upscale()));
    for (std::size_t l = depth; l-- > stop;) {
        const std::string p = "unet.dec" + std::to_string(l);
        up_.emplace_back(params, p + ".up", width(l + 1), width(l), 2, 2, rng);
        decoder_.push_back({BasicConv2d<T>(params, p + ".conv1", 2 * width(l), width(l), 3, rng, kSame3x3),
                            BasicConv2d<T>(params, p + ".conv2", width(l), width(l), 3, rng, kSame3x3)});
    }
    project_ = BasicConv2d<T>(params, "unet.project", width(stop), config.channels, 1, rng);
}

template <typename T>
BasicFeatureMap<T> BasicUNetBranch<T>::forward(const BasicTensor<T>& image) const {
    check_image(image, config_, "unet_forward");
    std::vector<BasicTensor<T>> skips;
    BasicTensor<T> x = image;
    for (std::size_t l = 0; l < encoder_.size(); ++l) {
        x = relu(encoder_[l].second.forward(relu(encoder_[l].first.forward(x))));
        skips.push_back(x);
        x = relu(down_[l].forward(x));
    }
    x = relu(bottleneck_.second.forward(relu(bottleneck_.first.forward(x))));
    for (std::size_t i = 0; i < up_.size(); ++i) {
        const BasicTensor<T>& skip = skips[skips.size() - 1 - i];
        x = relu(up_[i].forward(x));
        x = concat<T>({x, skip}, 0);
        x = relu(decoder_[i].second.forward(relu(decoder_[i].first.forward(x))));
    }
    return {project_.forward(x), Branch::local};
}

template <typename T>
BasicTransformerBranch<T>::BasicTransformerBranch(const BackboneConfig& config, BasicParameterSet<T>& params,
                                                  Rng& rng)
    : config_(config) {
    config.validate();
    const std::size_t d = config.token_dim;
    const std::size_t p = config.patch_size;
    const std::size_t n = config.token_grid() * config.token_grid();
    patch_embed_ = BasicConv2d<T>(params, "vit.patch_embed", 1, d, p, rng, Conv2dOptions{p, 0});
    BasicTensor<T> pos(Shape{n, d});
    glorot_uniform(pos, n, d, rng);
    position_ = params.add("vit.position", pos);
    for (std::size_t l = 0; l < config.transformer_layers; ++l) {
        const std::string b = "vit.block" + std::to_string(l);
        blocks_.push_back({BasicLayerNorm<T>(params, b + ".norm1", d), BasicLinear<T>(params, b + ".qkv", d, 3 * d, rng),
                           BasicLinear<T>(params, b + ".proj", d, d, rng), BasicLayerNorm<T>(params, b + ".norm2", d),
                           BasicLinear<T>(params, b + ".fc1", d, config.mlp_dim, rng),
                           BasicLinear<T>(params, b + ".fc2", config.mlp_dim, d, rng)});
    }
    final_norm_ = BasicLayerNorm<T>(params, "vit.norm", d);
    const std::size_t factor = config.feature_size / config.token_grid();
    if (factor > 1) {
        upsample_ = BasicTransposeConv2d<T>(params, "vit.upsample", d, config.channels, factor, factor, rng);
    } else {
        pointwise_ = BasicConv2d<T>(params, "vit.upsample", d, config.channels, 1, rng);
    }
}

template <typename T>
BasicTensor<T> BasicTransformerBranch<T>::attention(const Block& block, const BasicTensor<T>& x,
                                                  BasicAttentionTrace<T>* trace) const {
    const std::size_t d = config_.token_dim;
    const std::size_t dh = d / config_.heads;
    const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(dh));
    BasicTensor<T> qkv = block.qkv.forward(x);
    std::vector<BasicTensor<T>> heads;
    for (std::size_t h = 0; h < config_.heads; ++h) {
        BasicTensor<T> q = slice(qkv, 1, h * dh, (h + 1) * dh);
        BasicTensor<T> k = slice(qkv, 1, d + h * dh, d + (h + 1) * dh);
        BasicTensor<T> v = slice(qkv, 1, 2 * d + h * dh, 2 * d + (h + 1) * dh);
        BasicTensor<T> weights = softmax(scale(matmul(q, transpose(k)), inv_sqrt), 1);
        if (trace) trace->weights.push_back(weights);
        heads.push_back(matmul(weights, v));
    }
    return block.proj.forward(concat(heads, 1));
}

template <typename T>
BasicTensor<T> BasicTransformerBranch<T>::tokens(const BasicTensor<T>& image, BasicAttentionTrace<T>* trace) const {
    check_image(image, config_, "transformer_forward");
    const std::size_t d = config_.token_dim;
    const std::size_t n = config_.token_grid() * config_.token_grid();
    BasicTensor<T> x = transpose(reshape(patch_embed_.forward(image), Shape{d, n}));
    x = add(x, position_);
    for (const auto& block : blocks_) {
        x = add(x, attention(block, block.norm1.forward(x), trace));
        BasicTensor<T> hidden = gelu(block.fc1.forward(block.norm2.forward(x)));
        x = add(x, block.fc2.forward(hidden));
    }
    return final_norm_.forward(x);
}

template <typename T>
BasicFeatureMap<T> BasicTransformerBranch<T>::forward(const BasicTensor<T>& image, BasicAttentionTrace<T>* trace) const {
    const std::size_t g = config_.token_grid();
    BasicTensor<T> grid = reshape(transpose(tokens(image, trace)), Shape{config_.token_dim, g, g});
    BasicTensor<T> out = config_.feature_size > g ? upsample_.forward(grid) : pointwise_.forward(grid);
    return {out, Branch::global};
}

template <typename T>
BasicHeatmapHead<T>::BasicHeatmapHead(const BackboneConfig& config, BasicParameterSet<T>& params, Rng& rng)
    : conv_(params, "head", config.channels, config.num_landmarks, 1, rng) {
    const double p = config.head_prior;
    const T bias = static_cast<T>(std::log(p / (1.0 - p)));
    for (T& b : conv_.bias().data()) b = bias;
}

template <typename T>
BasicTensor<T> BasicHeatmapHead<T>::logits(const BasicFeatureMap<T>& fused) const { return conv_.forward(fused.tensor); }

template class BasicUNetBranch<float>;
template class BasicUNetBranch<double>;
template class BasicTransformerBranch<float>;
template class BasicTransformerBranch<double>;
template class BasicHeatmapHead<float>;
template class BasicHeatmapHead<double>;

}  // namespace hipmark
