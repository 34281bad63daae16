#include "survbma/rng.hpp"

#include <cmath>
#include <numbers>

#include "survbma/special.hpp"

namespace survbma {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(splitmix64(base) ^ splitmix64(index + 0x51ED2701FFULL));
}

double Rng::normal() { return special::normal_quantile(uniform01()); }

double Rng::cauchy(double location, double scale) {
    return location + scale * std::tan(std::numbers::pi * (uniform01() - 0.5));
}

double Rng::half_cauchy(double scale) {
    return scale * std::tan(std::numbers::pi * 0.5 * uniform01());
}

}  // namespace survbma
