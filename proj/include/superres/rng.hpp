#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace superres {

/// splitmix64 mixing step; used both to key the generator and to derive
/// per-trial subseeds. Fixed here so runs are reproducible across builds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return mix64(mix64(a) ^ b); }

/// Deterministic source of uniforms and normals.
///
/// Identity (pinned for reproducibility): std::mt19937_64 seeded with
/// mix64(seed); uniform doubles take the top 53 bits of each draw; normals
/// come from the Box-Muller transform of two uniforms. None of the
/// distribution adapters from <random> are used, since their output is not
/// specified by the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix64(seed)) {}

    /// Uniform on [0, 1).
    double uniform() {
        return double(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [0, 1) bounded away from 0, usable inside log().
    double uniform_positive() {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return u;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_positive();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Complex with independent N(0, sigma^2) real and imaginary parts.
    std::complex<double> complex_normal(double sigma) {
        const double re = sigma * normal();
        const double im = sigma * normal();
        return {re, im};
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace superres
