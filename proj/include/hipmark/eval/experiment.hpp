#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hipmark/eval/metrics.hpp"
#include "hipmark/model/network.hpp"
#include "hipmark/sample.hpp"
#include "hipmark/training/trainer.hpp"

namespace hipmark::eval {

struct KFoldConfig {
    std::size_t k = 5;
    std::uint64_t seed = 1;
    bool grouped = false;  // keep samples sharing a group id in one fold

    void validate() const;
};

/// Held-out indices per fold. Ungrouped: a seeded permutation dealt round-robin,
/// so fold sizes differ by at most one. Grouped: groups (ungrouped samples are
/// singletons) are permuted and dealt the same way. Throws ConfigError when k
/// exceeds the number of samples or groups.
std::vector<std::vector<std::size_t>> kfold_splits(const std::vector<ImageSample>& dataset, const KFoldConfig& config);

struct ExperimentConfig {
    ModelConfig model;
    training::TrainConfig train;
    KFoldConfig kfold;
};

/// Model initialisation seed of a fold; shared by every variant.
std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold);

SamplePrediction predict(const TgcnIcfNetwork& model, const ImageSample& sample);

struct FoldEvent {
    std::string variant;
    std::size_t fold = 0;
    std::size_t folds = 0;
    const FoldMetrics* metrics = nullptr;
};
using FoldCallback = std::function<void(const FoldEvent&)>;

/// Trains one model per fold on the other folds and evaluates it on the held-out one.
MetricsReport kfold_run(const std::vector<ImageSample>& dataset, const ExperimentConfig& config,
                        const std::string& variant = "full", const FoldCallback& on_fold = {});

inline constexpr Variant kAblationVariants[] = {Variant::concat_baseline, Variant::without_mmf,
                                                Variant::without_tgcn, Variant::full};

/// kfold_run for each ablation variant over one shared split.
std::vector<MetricsReport> ablation_run(const std::vector<ImageSample>& dataset, const ExperimentConfig& config,
                                        const FoldCallback& on_fold = {});

inline constexpr const char* kAblationCsvHeader = "variant,mre_mm,sdr05,sdr10,sdr15";

/// Comparison table: one row per variant, "mean ± sd" cells across folds,
/// followed by a commented, non-binding footer with the published
/// full-model figures obtained on clinical data.
std::string ablation_table(const std::vector<MetricsReport>& reports);
void write_ablation_csv(const std::filesystem::path& path, const std::vector<MetricsReport>& reports);

}  // namespace hipmark::eval
