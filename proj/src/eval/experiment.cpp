#include "hipmark/eval/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "hipmark/diffcore/random.hpp"
#include "hipmark/error.hpp"
#include "hipmark/eval/decode.hpp"

namespace hipmark::eval {

namespace {

constexpr std::uint64_t kSplitStream = 0x4b46;
constexpr std::uint64_t kFoldStream = 0x464f;

template <typename Vec>
void shuffle(Vec& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::string mean_sd_cell(const MeanSd& m, int digits) { return fmt::format("{:.{}f} ± {:.{}f}", m.mean, digits, m.sd, digits); }

}  // namespace

void KFoldConfig::validate() const {
    if (k < 2) throw ConfigError("folds must be >= 2");
}

std::vector<std::vector<std::size_t>> kfold_splits(const std::vector<ImageSample>& dataset,
                                                   const KFoldConfig& config) {
    config.validate();
    Rng rng(mix_seed(config.seed, kSplitStream));
    std::vector<std::vector<std::size_t>> units;
    if (config.grouped) {
        std::map<int, std::size_t> slot;
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            const int g = dataset[i].group;
            if (g < 0) {
                units.push_back({i});
                continue;
            }
            auto [it, inserted] = slot.emplace(g, units.size());
            if (inserted) units.emplace_back();
            units[it->second].push_back(i);
        }
    } else {
        for (std::size_t i = 0; i < dataset.size(); ++i) units.push_back({i});
    }
    if (config.k > units.size()) {
        throw ConfigError(fmt::format("folds = {} exceeds the {} {} available", config.k, units.size(),
                                      config.grouped ? "groups" : "samples"));
    }
    shuffle(units, rng);
    std::vector<std::vector<std::size_t>> folds(config.k);
    for (std::size_t u = 0; u < units.size(); ++u) {
        auto& f = folds[u % config.k];
        f.insert(f.end(), units[u].begin(), units[u].end());
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold) { return mix_seed(seed, kFoldStream, fold); }

SamplePrediction predict(const TgcnIcfNetwork& model, const ImageSample& sample) {
    NoGradGuard no_grad;
    const ModelOutput out = model.forward(sample.image);
    const auto decoded = decode_landmarks(out.decode_source(), static_cast<double>(model.config().backbone.upscale()));
    SamplePrediction p;
    p.pred = decoded.points;
    p.gt = sample.landmarks;
    p.spacing_mm = sample.spacing_mm;
    p.label = sample.label;
    if (out.class_logit.defined()) p.probability = 1.0 / (1.0 + std::exp(-static_cast<double>(out.class_logit.item())));
    return p;
}

namespace {

MetricsReport run_split(const std::vector<ImageSample>& dataset, const std::vector<std::vector<std::size_t>>& folds,
                        const ExperimentConfig& config, const std::string& variant, const FoldCallback& on_fold) {
    std::vector<FoldMetrics> results;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<bool> held(dataset.size(), false);
        for (std::size_t i : folds[f]) held[i] = true;
        std::vector<ImageSample> train_set, test_set;
        for (std::size_t i = 0; i < dataset.size(); ++i) (held[i] ? test_set : train_set).push_back(dataset[i]);

        const std::uint64_t seed = fold_seed(config.train.seed, f);
        TgcnIcfNetwork model(config.model, seed);
        training::TrainConfig train = config.train;
        train.seed = seed;
        training::Trainer trainer(model, train);
        trainer.fit(train_set);

        std::vector<SamplePrediction> preds;
        preds.reserve(test_set.size());
        for (const auto& s : test_set) preds.push_back(predict(model, s));
        results.push_back(summarize_fold(preds, static_cast<int>(f)));
        if (on_fold) on_fold({variant, f, folds.size(), &results.back()});
    }
    return make_report(variant, std::move(results));
}

}  // namespace

MetricsReport kfold_run(const std::vector<ImageSample>& dataset, const ExperimentConfig& config,
                        const std::string& variant, const FoldCallback& on_fold) {
    if (dataset.empty()) throw ConfigError("dataset is empty");
    return run_split(dataset, kfold_splits(dataset, config.kfold), config, variant, on_fold);
}

std::vector<MetricsReport> ablation_run(const std::vector<ImageSample>& dataset, const ExperimentConfig& config,
                                        const FoldCallback& on_fold) {
    if (dataset.empty()) throw ConfigError("dataset is empty");
    const auto folds = kfold_splits(dataset, config.kfold);
    std::vector<MetricsReport> reports;
    for (Variant v : kAblationVariants) {
        ExperimentConfig c = config;
        c.model = apply_variant(config.model, v);
        reports.push_back(run_split(dataset, folds, c, variant_name(v), on_fold));
    }
    return reports;
}

std::string ablation_table(const std::vector<MetricsReport>& reports) {
    std::string out = std::string(kAblationCsvHeader) + "\n";
    for (const auto& r : reports) {
        const auto& a = r.aggregate;
        out += fmt::format("{},{},{:.2f},{:.2f},{:.2f}\n", r.variant, mean_sd_cell(a.mre_mm, 4), a.sdr[0].mean,
                           a.sdr[1].mean, a.sdr[2].mean);
    }
    out += "# non-binding: published full-model figures on clinical data: mre 0.4364 ± 0.0388 mm, "
           "sdr 72.33/94.73/98.47\n";
    return out;
}

void write_ablation_csv(const std::filesystem::path& path, const std::vector<MetricsReport>& reports) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << ablation_table(reports);
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace hipmark::eval
