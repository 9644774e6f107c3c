#pragma once

#include <cstddef>

namespace hipmark {

struct BackboneConfig {
    std::size_t input_size = 128;    // square grayscale input
    std::size_t feature_size = 32;   // h_f = w_f = heatmap resolution
    std::size_t channels = 32;       // c of f_l, f_g, f_m
    std::size_t unet_depth = 3;      // number of 2x downsamplings
    std::size_t unet_base_channels = 8;
    std::size_t patch_size = 8;
    std::size_t token_dim = 64;
    std::size_t transformer_layers = 2;
    std::size_t heads = 4;
    std::size_t mlp_dim = 128;
    std::size_t num_landmarks = 6;
    double head_prior = 0.1;         // initial heatmap level; head bias starts at logit(head_prior)

    /// Throws ConfigError when the sizes cannot be wired together.
    void validate() const;

    std::size_t token_grid() const { return input_size / patch_size; }
    std::size_t upscale() const { return input_size / feature_size; }
};

}  // namespace hipmark
