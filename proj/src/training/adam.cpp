#include "hipmark/training/adam.hpp"

#include <cmath>
#include <span>

#include "hipmark/error.hpp"

namespace hipmark::training {

Adam::Adam(ParameterSet& params, AdamConfig config) : params_(params), config_(config) {
    if (!(config.lr >= 0.0)) throw ConfigError("lr must be non-negative");
    if (!(config.beta1 >= 0.0 && config.beta1 < 1.0) || !(config.beta2 >= 0.0 && config.beta2 < 1.0)) {
        throw ConfigError("Adam betas must lie in [0, 1)");
    }
    for (const auto& e : params_.entries()) {
        m_.emplace_back(e.tensor.numel(), 0.0f);
        v_.emplace_back(e.tensor.numel(), 0.0f);
    }
}

void Adam::step() {
    ++steps_;
    const double t = static_cast<double>(steps_);
    const double c1 = 1.0 - std::pow(config_.beta1, t);
    const double c2 = 1.0 - std::pow(config_.beta2, t);
    const float b1 = static_cast<float>(config_.beta1), b2 = static_cast<float>(config_.beta2);
    const double lr = config_.lr;
    const auto& entries = params_.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        Tensor p = entries[i].tensor;
        const bool has_grad = p.has_grad();
        auto g = has_grad ? p.grad() : std::span<const float>{};
        auto w = p.data();
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t j = 0; j < w.size(); ++j) {
            const float gj = has_grad ? g[j] : 0.0f;
            m[j] = b1 * m[j] + (1.0f - b1) * gj;
            v[j] = b2 * v[j] + (1.0f - b2) * gj * gj;
            if (lr == 0.0) continue;
            const double m_hat = m[j] / c1;
            const double v_hat = v[j] / c2;
            w[j] = static_cast<float>(w[j] - lr * m_hat / (std::sqrt(v_hat) + config_.eps));
        }
    }
}

}  // namespace hipmark::training
