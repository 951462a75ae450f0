#pragma once

#include <cmath>
#include <cstdint>

namespace phicp {

/* Counter-based deterministic random numbers.
 *
 * All randomness in the library (measurement noise, power-iteration start
 * vectors, test draws) comes from the splitmix64 finalizer applied to
 * seed ^ (i * 0x9E3779B97F4A7C15), where i is the sample counter. The
 * mapping is stateless, so sample i can be produced in any order and two
 * runs with the same seed are bit-identical.
 *
 * Derived streams:
 *   uniform01_at(seed, i) = (bits >> 11) * 2^-53                in [0, 1)
 *   gaussian_at(seed, k)  = sqrt(-2 ln(1 - u_{2k})) cos(2 pi u_{2k+1})
 * i.e. Box-Muller (cosine branch) on counters 2k and 2k+1; the 1-u flip
 * keeps the log argument in (0, 1].
 */

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t i) {
    return splitmix64_mix(seed ^ (i * 0x9E3779B97F4A7C15ULL));
}

inline double uniform01_at(std::uint64_t seed, std::uint64_t i) {
    return static_cast<double>(splitmix64_at(seed, i) >> 11) * 0x1.0p-53;
}

inline double gaussian_at(std::uint64_t seed, std::uint64_t k) {
    const double u1 = 1.0 - uniform01_at(seed, 2 * k);
    const double u2 = uniform01_at(seed, 2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Sequential convenience wrapper over the same counter stream.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
    double uniform01() { return uniform01_at(seed_, next_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double gaussian() { return gaussian_at(seed_, gauss_next_++); }

  private:
    std::uint64_t seed_;
    std::uint64_t next_ = 0;
    std::uint64_t gauss_next_ = 1u << 20;  // separate counter range from uniform()
};

}  // namespace phicp
