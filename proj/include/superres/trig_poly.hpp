#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "superres/torus.hpp"

namespace superres {

/// A 1-periodic trigonometric polynomial p(t) = sum_{k=-f..f} c_k e^{i2pi k t},
/// stored by its coefficient vector (index k+f).
class TrigPoly {
public:
    TrigPoly() = default;

    TrigPoly(int cutoff, std::vector<Complex> coeffs)
        : cutoff_(cutoff), coeffs_(std::move(coeffs)) {
        assert(cutoff_ >= 0);
        assert(coeffs_.size() == static_cast<std::size_t>(2 * cutoff_ + 1));
    }

    static TrigPoly zero(int cutoff) {
        return TrigPoly(cutoff, std::vector<Complex>(2 * cutoff + 1, Complex(0.0)));
    }

    int cutoff() const { return cutoff_; }
    const std::vector<Complex>& coeffs() const { return coeffs_; }
    Complex coeff(int k) const { return coeffs_[static_cast<std::size_t>(k + cutoff_)]; }
    void set_coeff(int k, Complex c) { coeffs_[static_cast<std::size_t>(k + cutoff_)] = c; }

    Complex eval(double t) const {
        // Horner-style rotation: e^{i2pi k t} built by repeated multiplication.
        const Complex z = std::polar(1.0, kTwoPi * t);
        Complex w = std::polar(1.0, -kTwoPi * t * cutoff_);
        Complex acc(0.0);
        for (const Complex& c : coeffs_) {
            acc += c * w;
            w *= z;
        }
        return acc;
    }

    Complex eval(TorusPoint t) const { return eval(t.value); }

    /// Values on the uniform grid t_j = j/n, j = 0..n-1.
    std::vector<Complex> eval_grid(int n) const {
        std::vector<Complex> out(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = eval(double(j) / n);
        return out;
    }

    /// Termwise derivative: coefficients (i 2pi k) c_k, same cutoff.
    TrigPoly derivative() const {
        std::vector<Complex> d(coeffs_.size());
        for (int k = -cutoff_; k <= cutoff_; ++k) {
            d[static_cast<std::size_t>(k + cutoff_)] =
                Complex(0.0, kTwoPi * k) * coeff(k);
        }
        return TrigPoly(cutoff_, std::move(d));
    }

    /// |p(t)|^2 as a trig polynomial of cutoff 2f; real-valued on the circle.
    TrigPoly modulus_sq() const {
        const int f2 = 2 * cutoff_;
        std::vector<Complex> d(static_cast<std::size_t>(2 * f2 + 1), Complex(0.0));
        for (int k = -cutoff_; k <= cutoff_; ++k) {
            for (int l = -cutoff_; l <= cutoff_; ++l) {
                d[static_cast<std::size_t>((k - l) + f2)] += coeff(k) * std::conj(coeff(l));
            }
        }
        return TrigPoly(f2, std::move(d));
    }

    /// Max of |p| over a uniform grid of n points.
    double sup_norm_grid(int n) const {
        double m = 0.0;
        for (int j = 0; j < n; ++j) m = std::max(m, std::abs(eval(double(j) / n)));
        return m;
    }

private:
    int cutoff_ = 0;
    std::vector<Complex> coeffs_{Complex(0.0)};
};

}  // namespace superres
