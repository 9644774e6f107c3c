#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "hipmark/model/network.hpp"
#include "hipmark/sample.hpp"
#include "hipmark/training/adam.hpp"
#include "hipmark/training/loss.hpp"

namespace hipmark::training {

struct TrainConfig {
    double lr = 1e-4;
    std::size_t epochs = 100;
    std::size_t batch_size = 2;
    double lambda = 0.01;
    double sigma = 2.0;         // heatmap-scale px
    double hflip = 0.5;         // flip probability
    std::uint64_t seed = 1;
    std::size_t max_steps = 0;  // 0 = no cap beyond epochs

    void validate() const;
};

struct LossRecord {
    std::size_t epoch = 0;
    std::size_t step = 0;       // optimizer step, 1-based
    double l_landmark = 0.0;    // batch means
    double l_classify = 0.0;
    double total = 0.0;
};

inline constexpr const char* kLossLogHeader = "epoch,step,l_landmark,l_classify,total";
void write_loss_record(std::ostream& out, const LossRecord& record);

/// Targets of one sample under the model's geometry.
Tensor targets_for(const ImageSample& sample, const ModelConfig& model, double sigma);

/// Loss of one sample; the objective is differentiable w.r.t. the model.
template <typename T>
BasicLossBreakdown<T> sample_loss(const BasicTgcnIcfNetwork<T>& model, const ImageSample& sample, double sigma,
                                  double lambda);

class Trainer {
   public:
    Trainer(TgcnIcfNetwork& model, TrainConfig config);

    /// Runs epochs from the current epoch counter until `epochs` or `max_steps`.
    /// Sample order per epoch and flip decisions per (sample, epoch) come from
    /// streams derived from the seed. Throws ConfigError on an empty dataset,
    /// NumericError on a non-finite loss.
    std::vector<LossRecord> fit(const std::vector<ImageSample>& dataset,
                                const std::function<void(const LossRecord&)>& on_step = {});

    TgcnIcfNetwork& model() { return model_; }
    Adam& optimizer() { return adam_; }
    const TrainConfig& config() const { return config_; }
    std::size_t epoch() const { return epoch_; }
    void set_epoch(std::size_t epoch) { epoch_ = epoch; }

   private:
    TgcnIcfNetwork& model_;
    TrainConfig config_;
    Adam adam_;
    std::size_t epoch_ = 0;
};

/// Per-epoch sample order.
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);
/// Whether sample `index` is flipped in `epoch`.
bool flip_decision(std::uint64_t seed, std::size_t index, std::size_t epoch, double probability);

}  // namespace hipmark::training
