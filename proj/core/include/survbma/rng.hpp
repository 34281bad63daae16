#pragma once

#include <cstdint>
#include <random>

namespace survbma {

/// SplitMix64 finalizer; used to derive statistically independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Derive the `index`-th sub-seed of `base`. Chaining derive_seed calls yields a
/// splittable counter scheme, e.g. derive(derive(master, look), model).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Deterministic random stream. All distribution transforms are implemented
/// in-house so that identical seeds give identical draws on every platform;
/// standard-library distributions are deliberately avoided.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw strictly inside (0, 1): (k + 0.5) / 2^53.
    double uniform01() {
        const std::uint64_t k = engine_() >> 11;
        return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via the inverse CDF (one uniform per draw).
    double normal();

    double cauchy(double location, double scale);
    double half_cauchy(double scale);

    std::uint64_t next_raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace survbma
