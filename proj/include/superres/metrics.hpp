#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "superres/kernels.hpp"
#include "superres/torus.hpp"

namespace superres {

/// Radius of the near regions around support points, in units of lambda.
inline constexpr double kNearRadiusFactor = 0.16;

/// Super-resolution factor f_hi / f_lo = lambda_lo / lambda_hi.
inline double srf(int f_lo, int f_hi) {
    if (f_lo < 1) throw std::invalid_argument("srf: f_lo must be >= 1");
    if (f_hi < f_lo) throw std::invalid_argument("srf: f_hi must be >= f_lo");
    return double(f_hi) / double(f_lo);
}

/// Partition of the circle into balls of radius 0.16*lambda around the
/// support points (S_near(j)) and their complement (S_far).
struct Partition {
    double lambda;
    std::vector<TorusPoint> support;
    double near_radius;

    Partition(double lambda, std::vector<TorusPoint> support_points)
        : lambda(lambda),
          support(std::move(support_points)),
          near_radius(kNearRadiusFactor * lambda) {
        if (support.empty()) throw std::invalid_argument("Partition: support must be nonempty");
    }

    /// Index of the closest support point and the circle distance to it.
    std::pair<std::size_t, double> nearest(TorusPoint t) const {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < support.size(); ++j) {
            const double d = wrap_distance(t, support[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        return {best, best_d};
    }

    bool is_near(TorusPoint t) const { return nearest(t).second <= near_radius; }
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

namespace detail {

inline double smoothed_l1_on_grid(const SpikeTrain& h, int f_hi, int n_points) {
    // Periodic trapezoid rule == mean of the integrand over the uniform grid.
    double acc = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double t = double(i) / n_points;
        Complex v(0.0);
        for (const Spike& s : h.spikes()) {
            v += s.amplitude * fejer_eval(f_hi, TorusPoint(t - s.location.value));
        }
        acc += std::abs(v);
    }
    return acc / n_points;
}

}  // namespace detail

/// ||K_hi * h||_L1 by composite trapezoid quadrature on a uniform grid, with
/// a Richardson-style error estimate from a half-resolution pass.
inline QuadratureResult smoothed_l1_error_quad(const SpikeTrain& h, int f_hi,
                                               int quad_points = 0) {
    if (f_hi < 1) throw std::invalid_argument("smoothed_l1_error: f_hi must be >= 1");
    if (quad_points == 0) quad_points = 64 * (f_hi + 1);
    if (quad_points < 32 * (f_hi + 1)) {
        throw std::invalid_argument("smoothed_l1_error: quad_points must be >= 32*(f_hi+1)");
    }
    if (h.empty()) return {0.0, 0.0};
    const double full = detail::smoothed_l1_on_grid(h, f_hi, quad_points);
    const double half = detail::smoothed_l1_on_grid(h, f_hi, quad_points / 2);
    return {full, std::fabs(full - half) / 3.0};
}

inline double smoothed_l1_error(const SpikeTrain& h, int f_hi, int quad_points = 0) {
    return smoothed_l1_error_quad(h, f_hi, quad_points).value;
}

struct NearFarDecomposition {
    double tv_far = 0.0;  // total modulus of h outside all near balls
    double i_near = 0.0;  // (1/lambda_lo^2) sum of (t - t_j)^2 |amplitude| over near balls
};

/// Splits |h| across the partition at scale lambda. The weighted second
/// moment keeps 1/lambda_lo^2 in front regardless of lambda, matching the
/// definition the error decomposition uses at both scales.
inline NearFarDecomposition near_far_decomposition(const SpikeTrain& h,
                                                   const std::vector<TorusPoint>& support,
                                                   double lambda, double lambda_lo) {
    Partition part(lambda, support);
    NearFarDecomposition out;
    for (const Spike& s : h.spikes()) {
        const auto [j, d] = part.nearest(s.location);
        if (d <= part.near_radius) {
            out.i_near += d * d * std::abs(s.amplitude) / (lambda_lo * lambda_lo);
        } else {
            out.tv_far += std::abs(s.amplitude);
        }
    }
    return out;
}

/// Empirical constant error / (SRF^2 delta) for the stability bound.
inline double theorem_bound_check(double error, double srf_value, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("theorem_bound_check: delta must be > 0");
    if (srf_value < 1.0) throw std::invalid_argument("theorem_bound_check: srf must be >= 1");
    return error / (srf_value * srf_value * delta);
}

}  // namespace superres
