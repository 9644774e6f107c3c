#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hipmark/eval/experiment.hpp"
#include "hipmark/model/network.hpp"
#include "hipmark/synthgen/dataset.hpp"
#include "hipmark/training/trainer.hpp"

namespace hipmark::cli {

struct KeyInfo {
    const char* key;
    const char* default_value;
    const char* help;
};

/// Every recognised key with its default, in file order.
std::span<const KeyInfo> config_keys();

/// Flat `key = value` configuration; `#` starts a comment. Unknown keys and
/// unparsable values raise ConfigError naming the key.
class RunConfig {
   public:
    RunConfig();

    static RunConfig from_text(const std::string& text, const std::string& origin = "<text>");
    static RunConfig from_file(const std::filesystem::path& path);

    /// Applies the lines of `text` on top of the current values.
    void merge_text(const std::string& text, const std::string& origin);
    void set(const std::string& key, const std::string& value);
    const std::string& get(const std::string& key) const;

    double get_double(const std::string& key) const;
    std::size_t get_size(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    /// Canonical dump of every key, suitable for from_text.
    std::string to_text() const;

    ModelConfig model_config() const;
    training::TrainConfig train_config() const;
    synth::SynthConfig synth_config() const;
    eval::KFoldConfig kfold_config() const;
    eval::ExperimentConfig experiment_config() const;

    /// Builds every section, surfacing invalid combinations as ConfigError.
    void validate() const;

   private:
    std::map<std::string, std::string> values_;
};

/// `--key value` / `--key=value` pairs; keys are config keys.
void apply_overrides(RunConfig& config, const std::vector<std::string>& args);

}  // namespace hipmark::cli
