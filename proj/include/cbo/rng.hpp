#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace cbo {

// splitmix64; tiny, well studied, and fully portable so that trajectories
// reproduce bit-for-bit from a manifest regardless of the platform stdlib.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
    (void)splitmix64_next(s);
    return s;
}

/// Small deterministic generator (splitmix64 stream + Box-Muller normals).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    /// Uniform in the open interval (0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    void fill_normals(std::span<double> out) {
        for (double& v : out) v = normal();
    }

    /// Uniform sample from the closed ball of given radius in R^dim.
    void uniform_in_ball(int dim, double radius, std::span<double> out) {
        double n2 = 0.0;
        do {
            n2 = 0.0;
            for (int i = 0; i < dim; ++i) {
                out[i] = normal();
                n2 += out[i] * out[i];
            }
        } while (n2 == 0.0);
        const double r = radius * std::pow(uniform(), 1.0 / dim) / std::sqrt(n2);
        for (int i = 0; i < dim; ++i) out[i] *= r;
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Counter-based noise: the stream is keyed by (seed, particle, step) so a
/// given increment can be regenerated independently of execution order.
inline Rng noise_stream(std::uint64_t seed, std::uint64_t particle, std::uint64_t step) {
    return Rng(mix_key(mix_key(seed, particle), step));
}

inline void standard_normals(std::uint64_t seed, std::uint64_t particle, std::uint64_t step,
                             std::span<double> out) {
    Rng r = noise_stream(seed, particle, step);
    r.fill_normals(out);
}

}  // namespace cbo
