#include "hipmark/backbone/config.hpp"

#include <string>

#include "hipmark/error.hpp"

namespace hipmark {

namespace {
bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }
}  // namespace

void BackboneConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("backbone: " + msg); };
    if (input_size == 0 || feature_size == 0 || channels == 0 || patch_size == 0 ||
        token_dim == 0 || heads == 0 || mlp_dim == 0 || unet_base_channels == 0 ||
        num_landmarks == 0) {
        fail("all sizes must be positive");
    }
    if (unet_depth == 0 || unet_depth > 8) fail("unet_depth must be in [1, 8]");
    if (input_size % (std::size_t{1} << unet_depth) != 0) {
        fail("input_size " + std::to_string(input_size) + " not divisible by 2^unet_depth");
    }
    if (input_size % patch_size != 0) {
        fail("input_size " + std::to_string(input_size) + " not divisible by patch_size " +
             std::to_string(patch_size));
    }
    if (input_size % feature_size != 0 || !is_power_of_two(input_size / feature_size)) {
        fail("input_size / feature_size must be a power of two");
    }
    // The decoder needs at least one upsampling stage above the bottleneck.
    if (input_size / feature_size >= (std::size_t{1} << unet_depth)) {
        fail("feature_size must be larger than the U-Net bottleneck resolution");
    }
    if (feature_size % token_grid() != 0) {
        fail("feature_size must be a multiple of the token grid input_size / patch_size");
    }
    if (token_dim % heads != 0) fail("token_dim must be divisible by heads");
    if (!(head_prior > 0.0 && head_prior < 1.0)) fail("head_prior must lie in (0, 1)");
}

}  // namespace hipmark
