#pragma once

#include <cstdint>
#include <random>

#include "hipmark/diffcore/tensor.hpp"

namespace hipmark {

/// splitmix64 finalizer; used to derive independent streams from (seed, index, ...).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Seeded generator whose derived distributions are bit-stable across
/// standard libraries (the std:: distributions are implementation-defined).
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    bool bernoulli(double p) { return uniform() < p; }

   private:
    std::mt19937_64 engine_;
};

/// uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
template <typename T>
void glorot_uniform(BasicTensor<T>& t, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace hipmark
