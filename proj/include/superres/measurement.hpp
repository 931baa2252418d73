#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "superres/rng.hpp"
#include "superres/torus.hpp"

namespace superres {

using Eigen::VectorXcd;

/// Noise attached to the spectral samples.
///  - None: exact data, delta = 0.
///  - GaussianSpectral: iid complex noise, real and imaginary parts
///    independent N(0, sigma^2); delta is calibrated from (sigma, gamma).
///  - ExplicitSpectral: caller-supplied noise vector and budget; also the
///    hook for bounded adversarial perturbations (a band-limited z with
///    ||z||_L1 <= delta has spectral samples bounded by ||z_hat||_inf <=
///    ||z||_L1, so any such z can be passed here explicitly).
struct NoiseSpec {
    enum class Kind { None, GaussianSpectral, ExplicitSpectral };

    Kind kind = Kind::None;
    double sigma = 0.0;
    double gamma = 0.0;
    std::uint64_t seed = 0;
    VectorXcd values;   // ExplicitSpectral only, ordered k = -f_lo..f_lo
    double delta = 0.0; // ExplicitSpectral only

    static NoiseSpec none() { return {}; }

    static NoiseSpec gaussian(double sigma, double gamma, std::uint64_t seed) {
        NoiseSpec n;
        n.kind = Kind::GaussianSpectral;
        n.sigma = sigma;
        n.gamma = gamma;
        n.seed = seed;
        return n;
    }

    static NoiseSpec explicit_spectral(VectorXcd values, double delta) {
        NoiseSpec n;
        n.kind = Kind::ExplicitSpectral;
        n.values = std::move(values);
        n.delta = delta;
        return n;
    }
};

/// The n = 2 f_lo + 1 noisy Fourier samples eta(k), k = -f_lo..f_lo, with the
/// noise budget delta used by the recovery program.
struct Measurement {
    int f_lo = 0;
    VectorXcd samples;  // index k + f_lo
    double delta = 0.0;

    int n() const { return 2 * f_lo + 1; }
};

/// Exact low-pass measurements: entry k is sum_j a_j e^{-i 2 pi k t_j}.
inline VectorXcd forward(const SpikeTrain& x, int f_lo) {
    if (f_lo < 1) throw std::invalid_argument("forward: f_lo must be >= 1");
    const int n = 2 * f_lo + 1;
    VectorXcd out = VectorXcd::Zero(n);
    for (const Spike& s : x.spikes()) {
        const Complex z = std::polar(1.0, -kTwoPi * s.location.value);
        Complex w = std::polar(1.0, kTwoPi * f_lo * s.location.value);  // z^{-f_lo}
        for (int i = 0; i < n; ++i) {
            out[i] += s.amplitude * w;
            w *= z;
        }
    }
    return out;
}

/// Corollary-1 noise budget delta = (1+gamma) sigma sqrt(4 f_lo + 2), the
/// one-sided chi-square bound on ||eps||_2 that holds with probability at
/// least 1 - e^{-2 f_lo gamma^2}.
inline double calibrate_delta(double sigma, double gamma, int f_lo) {
    if (!(sigma > 0.0)) throw std::invalid_argument("calibrate_delta: sigma must be > 0");
    if (gamma < 0.0) throw std::invalid_argument("calibrate_delta: gamma must be >= 0");
    if (f_lo < 1) throw std::invalid_argument("calibrate_delta: f_lo must be >= 1");
    return (1.0 + gamma) * sigma * std::sqrt(4.0 * f_lo + 2.0);
}

/// Samples = forward(x) + eps, deterministic given the seed in the spec.
inline Measurement measure(const SpikeTrain& x, int f_lo, const NoiseSpec& noise) {
    Measurement m;
    m.f_lo = f_lo;
    m.samples = forward(x, f_lo);
    switch (noise.kind) {
        case NoiseSpec::Kind::None:
            m.delta = 0.0;
            break;
        case NoiseSpec::Kind::GaussianSpectral: {
            Rng rng(noise.seed);
            for (int i = 0; i < m.n(); ++i) m.samples[i] += rng.complex_normal(noise.sigma);
            m.delta = calibrate_delta(noise.sigma, noise.gamma, f_lo);
            break;
        }
        case NoiseSpec::Kind::ExplicitSpectral: {
            if (noise.values.size() != m.n()) {
                throw std::invalid_argument("measure: explicit noise length != 2 f_lo + 1");
            }
            m.samples += noise.values;
            m.delta = noise.delta;
            break;
        }
    }
    return m;
}

/// l2 norm of samples - forward(x); by Parseval this is the L2 norm of the
/// band-limited residual function.
inline double residual_norm(const Measurement& m, const SpikeTrain& x) {
    return (m.samples - forward(x, m.f_lo)).norm();
}

}  // namespace superres
