#include "hipmark/cli/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "hipmark/error.hpp"

namespace hipmark::cli {

namespace {

constexpr KeyInfo kKeys[] = {
    // model
    {"input_size", "128", "square input side in px"},
    {"feature_size", "32", "heatmap / fused feature side in px"},
    {"channels", "32", "channels of the local, global and fused feature maps"},
    {"unet_depth", "3", "number of 2x downsamplings in the local branch"},
    {"unet_base_channels", "8", "local branch width at full resolution (doubles per level)"},
    {"patch_size", "8", "global branch patch side in px"},
    {"token_dim", "64", "global branch token width"},
    {"transformer_layers", "2", "global branch encoder blocks"},
    {"heads", "4", "attention heads per block"},
    {"mlp_dim", "128", "hidden width of the encoder MLP"},
    {"head_prior", "0.1", "initial heatmap level; the head bias starts at its logit"},
    {"fusion", "mmf", "branch fusion: mmf or concat"},
    {"combine", "concat", "how the two modulated maps are merged: concat (+1x1 projection) or sum"},
    {"mmf_window", "3", "odd neighbourhood side of the modulation window"},
    {"use_tgcn", "true", "attach the graph refinement and classification head"},
    {"gcn_layers", "2", "graph convolution layers"},
    {"class_hidden", "64", "hidden width of the classification projection"},
    {"tgcn_residual", "true", "refined maps are sigmoid(head logits + graph output) instead of sigmoid(graph output)"},
    // training
    {"lr", "0.0001", "Adam learning rate (constant)"},
    {"epochs", "100", "training epochs"},
    {"batch_size", "2", "samples per optimizer step"},
    {"lambda", "0.01", "weight of the classification loss"},
    {"sigma", "2.0", "target Gaussian width in heatmap px"},
    {"hflip", "0.5", "horizontal flip probability"},
    {"seed", "1", "seed for initialisation, shuffling, augmentation and fold splits"},
    {"max_steps", "0", "stop after this many optimizer steps (0 = run all epochs)"},
    // evaluation
    {"folds", "5", "cross-validation folds"},
    {"grouped", "false", "keep samples sharing a group id in the same fold"},
    // synthetic data
    {"synth.count", "64", "number of generated samples"},
    {"synth.balance", "0.5", "fraction of abnormal samples"},
    {"synth.spacing_mm", "0.1", "pixel spacing in mm"},
    {"synth.image_size", "128", "generated image side in px"},
    {"synth.seed", "1", "generator seed"},
    {"synth.speckle", "0.3", "multiplicative speckle amplitude"},
    {"synth.subjects", "0", "if > 0, sample i gets group id i % subjects"},
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
    throw ConfigError(fmt::format("config key '{}': expected {}, got '{}'", key, expected, value));
}

template <typename T>
T parse_int(const std::string& key, const std::string& v) {
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
    return out;
}

}  // namespace

std::span<const KeyInfo> config_keys() { return kKeys; }

RunConfig::RunConfig() {
    for (const auto& k : kKeys) values_[k.key] = k.default_value;
}

RunConfig RunConfig::from_text(const std::string& text, const std::string& origin) {
    RunConfig c;
    c.merge_text(text, origin);
    return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return from_text(text.str(), path.string());
}

void RunConfig::merge_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(fmt::format("{}:{}: expected 'key = value', got '{}'", origin, line_no, body));
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        try {
            set(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}:{}: {}", origin, line_no, e.what()));
        }
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string& key) const {
    const std::string& v = get(key);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a number");
    return out;
}

std::size_t RunConfig::get_size(const std::string& key) const { return parse_int<std::size_t>(key, get(key)); }
std::uint64_t RunConfig::get_u64(const std::string& key) const { return parse_int<std::uint64_t>(key, get(key)); }

bool RunConfig::get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, v, "true or false");
}

std::string RunConfig::to_text() const {
    std::string out;
    for (const auto& k : kKeys) out += fmt::format("{} = {}\n", k.key, values_.at(k.key));
    return out;
}

ModelConfig RunConfig::model_config() const {
    ModelConfig m;
    auto& b = m.backbone;
    b.input_size = get_size("input_size");
    b.feature_size = get_size("feature_size");
    b.channels = get_size("channels");
    b.unet_depth = get_size("unet_depth");
    b.unet_base_channels = get_size("unet_base_channels");
    b.patch_size = get_size("patch_size");
    b.token_dim = get_size("token_dim");
    b.transformer_layers = get_size("transformer_layers");
    b.heads = get_size("heads");
    b.mlp_dim = get_size("mlp_dim");
    b.head_prior = get_double("head_prior");
    m.fusion.mode = mmf::parse_fusion_mode(get("fusion"));
    m.fusion.combine = mmf::parse_combine(get("combine"));
    m.fusion.window = get_size("mmf_window");
    m.use_tgcn = get_bool("use_tgcn");
    m.tgcn.layers = get_size("gcn_layers");
    m.tgcn.class_hidden = get_size("class_hidden");
    m.tgcn.residual = get_bool("tgcn_residual");
    return m;
}

training::TrainConfig RunConfig::train_config() const {
    training::TrainConfig t;
    t.lr = get_double("lr");
    t.epochs = get_size("epochs");
    t.batch_size = get_size("batch_size");
    t.lambda = get_double("lambda");
    t.sigma = get_double("sigma");
    t.hflip = get_double("hflip");
    t.seed = get_u64("seed");
    t.max_steps = get_size("max_steps");
    return t;
}

synth::SynthConfig RunConfig::synth_config() const {
    synth::SynthConfig s;
    s.count = get_size("synth.count");
    s.balance = get_double("synth.balance");
    s.spacing_mm = get_double("synth.spacing_mm");
    s.image_size = get_size("synth.image_size");
    s.seed = get_u64("synth.seed");
    s.speckle = get_double("synth.speckle");
    s.subjects = get_size("synth.subjects");
    return s;
}

eval::KFoldConfig RunConfig::kfold_config() const {
    eval::KFoldConfig k;
    k.k = get_size("folds");
    k.seed = get_u64("seed");
    k.grouped = get_bool("grouped");
    return k;
}

eval::ExperimentConfig RunConfig::experiment_config() const {
    return {model_config(), train_config(), kfold_config()};
}

void RunConfig::validate() const {
    model_config().validate();
    train_config().validate();
    synth_config().validate();
    kfold_config().validate();
}

void apply_overrides(RunConfig& config, const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0 || a.size() == 2) throw ConfigError("unexpected argument '" + a + "'");
        const std::string body = a.substr(2);
        const auto eq = body.find('=');
        if (eq != std::string::npos) {
            config.set(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        if (i + 1 >= args.size()) throw ConfigError("override '" + a + "' has no value");
        config.set(body, args[++i]);
    }
}

}  // namespace hipmark::cli
