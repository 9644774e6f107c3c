#include "hipmark/training/trainer.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <type_traits>

#include <fmt/format.h>

#include "hipmark/diffcore/ops.hpp"
#include "hipmark/diffcore/random.hpp"
#include "hipmark/error.hpp"

namespace hipmark::training {

namespace {

constexpr std::uint64_t kShuffleStream = 0x5348;
constexpr std::uint64_t kFlipStream = 0x464c;

}  // namespace

void TrainConfig::validate() const {
    if (!(lr >= 0.0)) throw ConfigError("lr must be non-negative");
    if (epochs == 0) throw ConfigError("epochs must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
    if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (!(hflip >= 0.0 && hflip <= 1.0)) throw ConfigError("hflip must lie in [0, 1]");
}

void write_loss_record(std::ostream& out, const LossRecord& r) {
    out << fmt::format("{},{},{:.8g},{:.8g},{:.8g}\n", r.epoch, r.step, r.l_landmark, r.l_classify, r.total);
}

Tensor targets_for(const ImageSample& sample, const ModelConfig& model, double sigma) {
    const auto& b = model.backbone;
    if (sample.image.ndim() != 3 || sample.image.dim(0) != 1 || sample.image.dim(1) != b.input_size ||
        sample.image.dim(2) != b.input_size) {
        throw DataError(fmt::format("sample '{}': image {} does not match the model input [1, {}, {}]", sample.id,
                                    shape_str(sample.image.shape()), b.input_size, b.input_size));
    }
    if (sample.landmarks.size() != b.num_landmarks) {
        throw DataError(fmt::format("sample '{}': {} landmarks, model predicts {}", sample.id,
                                    sample.landmarks.size(), b.num_landmarks));
    }
    return make_gt_heatmaps(sample.landmarks, sigma, b.feature_size, b.feature_size, b.input_size, b.input_size,
                            sample.id);
}

template <typename T>
BasicLossBreakdown<T> sample_loss(const BasicTgcnIcfNetwork<T>& model, const ImageSample& sample, double sigma,
                                  double lambda) {
    const Tensor gt = targets_for(sample, model.config(), sigma);
    const auto widen = [](const Tensor& t) {
        if constexpr (std::is_same_v<T, float>) {
            return t;
        } else {
            return BasicTensor<T>(t.shape(), std::vector<T>(t.data().begin(), t.data().end()));
        }
    };
    const BasicModelOutput<T> out = model.forward(widen(sample.image));
    return total_loss(out.icf_heatmaps, out.refined, widen(gt), out.class_logit, sample.label, lambda);
}

template BasicLossBreakdown<float> sample_loss(const TgcnIcfNetwork&, const ImageSample&, double, double);
template BasicLossBreakdown<double> sample_loss(const BasicTgcnIcfNetwork<double>&, const ImageSample&, double,
                                                double);

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(seed, kShuffleStream, epoch));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    return order;
}

bool flip_decision(std::uint64_t seed, std::size_t index, std::size_t epoch, double probability) {
    Rng rng(mix_seed(mix_seed(seed, kFlipStream, index), epoch));
    return rng.bernoulli(probability);
}

Trainer::Trainer(TgcnIcfNetwork& model, TrainConfig config)
    : model_(model), config_(config), adam_(model.parameters(), AdamConfig{config.lr}) {
    config_.validate();
}

std::vector<LossRecord> Trainer::fit(const std::vector<ImageSample>& dataset,
                                     const std::function<void(const LossRecord&)>& on_step) {
    if (dataset.empty()) throw ConfigError("training dataset is empty");
    std::vector<LossRecord> log;
    auto& params = model_.parameters();
    const auto step_cap_reached = [&] { return config_.max_steps != 0 && adam_.steps() >= config_.max_steps; };
    for (; epoch_ < config_.epochs && !step_cap_reached(); ++epoch_) {
        const auto order = epoch_order(dataset.size(), config_.seed, epoch_);
        for (std::size_t begin = 0; begin < order.size() && !step_cap_reached(); begin += config_.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config_.batch_size);
            const float weight = 1.0f / static_cast<float>(end - begin);
            LossRecord rec;
            rec.epoch = epoch_;
            rec.step = adam_.steps() + 1;
            params.zero_grad();
            for (std::size_t b = begin; b < end; ++b) {
                const std::size_t index = order[b];
                const ImageSample& raw = dataset[index];
                const bool flip = flip_decision(config_.seed, index, epoch_, config_.hflip);
                const ImageSample sample = flip ? augment_hflip(raw) : raw;
                LossBreakdown loss = sample_loss(model_, sample, config_.sigma, config_.lambda);
                if (!std::isfinite(loss.total)) {
                    throw NumericError(fmt::format("non-finite loss at step {} (epoch {}, sample '{}')", rec.step,
                                                   epoch_, sample.id));
                }
                scale(loss.objective, weight).backward();
                rec.l_landmark += weight * loss.l_landmark;
                rec.l_classify += weight * loss.l_classify;
                rec.total += weight * loss.total;
            }
            adam_.step();
            log.push_back(rec);
            if (on_step) on_step(rec);
        }
    }
    return log;
}

}  // namespace hipmark::training
