#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "superres/trig_poly.hpp"

namespace superres {

/// Below this |sin(pi t)| the quotient forms are evaluated through their
/// Fourier series instead (removable singularity, catastrophic cancellation
/// nearby).
inline constexpr double kSingularitySin = 1e-8;

/// Periodic Dirichlet kernel sin(pi(2f+1)t)/sin(pi t), the ideal low-pass
/// kernel with unit Fourier coefficients for |k| <= f_lo.
inline double dirichlet_eval(int f_lo, TorusPoint t) {
    if (f_lo < 1) throw std::invalid_argument("dirichlet_eval: f_lo must be >= 1");
    const double s = std::sin(std::numbers::pi * t.value);
    if (std::fabs(s) < kSingularitySin) {
        double acc = 1.0;
        for (int k = 1; k <= f_lo; ++k) acc += 2.0 * std::cos(kTwoPi * k * t.value);
        return acc;
    }
    return std::sin(std::numbers::pi * (2 * f_lo + 1) * t.value) / s;
}

/// Fejer kernel with cut-off frequency f_hi: nonnegative, unit integral,
/// triangular Fourier coefficients (f_hi+1-|k|)/(f_hi+1).
inline double fejer_eval(int f_hi, TorusPoint t) {
    if (f_hi < 1) throw std::invalid_argument("fejer_eval: f_hi must be >= 1");
    const double s = std::sin(std::numbers::pi * t.value);
    if (std::fabs(s) < kSingularitySin) {
        double acc = 1.0;
        for (int k = 1; k <= f_hi; ++k) {
            acc += 2.0 * (double(f_hi + 1 - k) / (f_hi + 1)) * std::cos(kTwoPi * k * t.value);
        }
        return acc;
    }
    const double q = std::sin(std::numbers::pi * (f_hi + 1) * t.value) / s;
    return q * q / (f_hi + 1);
}

/// The squared-Fejer interpolation kernel
///   G(t) = [ sin((f_lo/2+1) pi t) / ((f_lo/2+1) sin(pi t)) ]^4,   G(0) = 1,
/// with derivatives up to order 3. Requires even f_lo; the kernel is then the
/// square of the Fejer kernel with cutoff f_lo/2, normalized to G(0) = 1.
///
/// Derivatives are taken in the coefficient domain (multiply by (i 2 pi k)^l,
/// sum directly); a closed-form quotient-rule path is kept alongside for
/// cross-checking the two routes against each other.
class SquaredFejerKernel {
public:
    explicit SquaredFejerKernel(int f_lo) : f_lo_(f_lo) {
        if (f_lo < 2 || f_lo % 2 != 0) {
            throw std::invalid_argument("SquaredFejerKernel: f_lo must be even and >= 2");
        }
        const int m = f_lo / 2 + 1;
        // Fejer(f_lo/2) coefficients (m-|k|)/m, then autocorrelate and divide
        // by m^2 so that the values square the Fejer kernel and G(0) = 1.
        std::vector<double> tri(static_cast<std::size_t>(2 * m - 1));
        for (int k = -(m - 1); k <= m - 1; ++k) {
            tri[static_cast<std::size_t>(k + m - 1)] = double(m - std::abs(k)) / m;
        }
        coeffs_.assign(static_cast<std::size_t>(2 * f_lo + 1), 0.0);
        for (int k = -(m - 1); k <= m - 1; ++k) {
            for (int l = -(m - 1); l <= m - 1; ++l) {
                coeffs_[static_cast<std::size_t>(k + l + f_lo)] +=
                    tri[static_cast<std::size_t>(k + m - 1)] *
                    tri[static_cast<std::size_t>(l + m - 1)] / double(m) / double(m);
            }
        }
    }

    int cutoff() const { return f_lo_; }

    /// |G''(0)| = pi^2 f_lo (f_lo + 4) / 3.
    double kappa() const {
        return std::numbers::pi * std::numbers::pi * f_lo_ * (f_lo_ + 4.0) / 3.0;
    }

    /// Real Fourier coefficients g_hat(k), k = -f_lo..f_lo.
    const std::vector<double>& fourier_coeffs() const { return coeffs_; }

    /// l-th derivative of G at t by direct summation of the Fourier series.
    double eval(int ell, TorusPoint t) const {
        check_order(ell);
        const Complex z = std::polar(1.0, kTwoPi * t.value);
        Complex w = std::polar(1.0, -kTwoPi * t.value * f_lo_);
        Complex acc(0.0);
        for (int k = -f_lo_; k <= f_lo_; ++k) {
            Complex term = coeffs_[static_cast<std::size_t>(k + f_lo_)] * w;
            Complex ik(0.0, kTwoPi * k);
            for (int p = 0; p < ell; ++p) term *= ik;
            acc += term;
            w *= z;
        }
        return acc.real();
    }

    /// Same derivative from the quotient closed form (s = N/D, G = s^4).
    /// Falls back to the series near the removable singularity.
    double eval_closed(int ell, TorusPoint t) const {
        check_order(ell);
        const double pi = std::numbers::pi;
        const int m = f_lo_ / 2 + 1;
        const double D = std::sin(pi * t.value);
        if (std::fabs(D) < kSingularitySin) return eval(ell, t);

        const double N = std::sin(m * pi * t.value) / m;
        const double N1 = pi * std::cos(m * pi * t.value);
        const double N2 = -m * pi * pi * std::sin(m * pi * t.value);
        const double N3 = -m * m * pi * pi * pi * std::cos(m * pi * t.value);
        const double D1 = pi * std::cos(pi * t.value);
        const double D2 = -pi * pi * std::sin(pi * t.value);
        const double D3 = -pi * pi * pi * std::cos(pi * t.value);

        const double s0 = N / D;
        const double s1 = (N1 - s0 * D1) / D;
        const double s2 = (N2 - 2.0 * s1 * D1 - s0 * D2) / D;
        const double s3 = (N3 - 3.0 * s2 * D1 - 3.0 * s1 * D2 - s0 * D3) / D;

        switch (ell) {
            case 0: return s0 * s0 * s0 * s0;
            case 1: return 4.0 * s0 * s0 * s0 * s1;
            case 2: return 12.0 * s0 * s0 * s1 * s1 + 4.0 * s0 * s0 * s0 * s2;
            default:
                return 24.0 * s0 * s1 * s1 * s1 + 36.0 * s0 * s0 * s1 * s2 +
                       4.0 * s0 * s0 * s0 * s3;
        }
    }

private:
    static void check_order(int ell) {
        if (ell < 0 || ell > 3) {
            throw std::invalid_argument("SquaredFejerKernel: derivative order must be 0..3");
        }
    }

    int f_lo_;
    std::vector<double> coeffs_;
};

/// One-off evaluation of G^(ell)(t); builds the coefficient table each call.
/// Hot paths should hold a SquaredFejerKernel instead.
inline double g_eval(int f_lo, int ell, TorusPoint t) {
    return SquaredFejerKernel(f_lo).eval(ell, t);
}

struct KernelFamily {
    enum class Kind { Dirichlet, Fejer, SquaredFejer };
    Kind kind;
    int cutoff;  // f_lo for Dirichlet/SquaredFejer, f_hi for Fejer
};

/// Coefficient-vector form of the three kernels.
inline TrigPoly to_trigpoly(const KernelFamily& kernel) {
    switch (kernel.kind) {
        case KernelFamily::Kind::Dirichlet: {
            const int f = kernel.cutoff;
            if (f < 1) throw std::invalid_argument("to_trigpoly: Dirichlet cutoff must be >= 1");
            return TrigPoly(f, std::vector<Complex>(static_cast<std::size_t>(2 * f + 1),
                                                    Complex(1.0)));
        }
        case KernelFamily::Kind::Fejer: {
            const int f = kernel.cutoff;
            if (f < 1) throw std::invalid_argument("to_trigpoly: Fejer cutoff must be >= 1");
            std::vector<Complex> c(static_cast<std::size_t>(2 * f + 1));
            for (int k = -f; k <= f; ++k) {
                c[static_cast<std::size_t>(k + f)] = Complex(double(f + 1 - std::abs(k)) / (f + 1));
            }
            return TrigPoly(f, std::move(c));
        }
        case KernelFamily::Kind::SquaredFejer:
        default: {
            SquaredFejerKernel g(kernel.cutoff);
            std::vector<Complex> c(g.fourier_coeffs().size());
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = Complex(g.fourier_coeffs()[i]);
            return TrigPoly(g.cutoff(), std::move(c));
        }
    }
}

}  // namespace superres
