#ifndef FRAMEOPT_RNG_HPP
#define FRAMEOPT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace frameopt {

// Seeded stream used by one optimizer run. All stochastic draws of a run come
// from a single instance so that (seed, config, problem) fixes the trajectory
// bit for bit. Floating-point draws are derived from the raw 64-bit output
// directly instead of std::uniform_real_distribution / normal_distribution,
// whose mappings are implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    // Uniform draw clamped to [eps, 1-eps] so that log(u) and log(-log(u))
    // stay finite.
    double uniform01() {
        const double eps = std::numeric_limits<double>::epsilon();
        double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        if (u < eps) u = eps;
        if (u > 1.0 - eps) u = 1.0 - eps;
        return u;
    }

    // Uniform integer in [0, n).
    int uniform_int(int n) {
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() -
            std::numeric_limits<std::uint64_t>::max() % static_cast<std::uint64_t>(n);
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return static_cast<int>(v % static_cast<std::uint64_t>(n));
    }

    // Standard normal via Box-Muller.
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace frameopt

#endif
