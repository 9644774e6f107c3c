#pragma once

#include <cstdint>
#include <vector>

#include "hipmark/diffcore/parameters.hpp"

namespace hipmark::training {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction over every tensor of a ParameterSet.
/// Moment buffers are kept in registration order.
class Adam {
   public:
    Adam(ParameterSet& params, AdamConfig config);

    /// Applies one update from the accumulated gradients (missing grads count as zero).
    void step();

    std::uint64_t steps() const { return steps_; }
    const AdamConfig& config() const { return config_; }
    void set_lr(double lr) { config_.lr = lr; }

    std::vector<std::vector<float>>& first_moments() { return m_; }
    std::vector<std::vector<float>>& second_moments() { return v_; }
    const std::vector<std::vector<float>>& first_moments() const { return m_; }
    const std::vector<std::vector<float>>& second_moments() const { return v_; }
    void set_steps(std::uint64_t steps) { steps_ = steps; }

   private:
    ParameterSet& params_;
    AdamConfig config_;
    std::uint64_t steps_ = 0;
    std::vector<std::vector<float>> m_;
    std::vector<std::vector<float>> v_;
};

}  // namespace hipmark::training
