#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "superres/errors.hpp"
#include "superres/kernels.hpp"
#include "superres/metrics.hpp"
#include "superres/torus.hpp"
#include "superres/trig_poly.hpp"

namespace superres {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct CertificateOptions {
    bool strict_separation = false;  // throw below 2*lambda_lo instead of flagging
    double condition_limit = 1e14;
    int grid_density = 64;  // verification grid has grid_density * f_lo points (min 1024)
};

/// The interpolation system of the certificate construction:
/// (D_l)_{jk} = G^(l)(t_j - t_k) and the Schur complement S = D2 - D1 D0^{-1} D1.
/// D0 and S are inverted explicitly so that the norms the stability argument
/// tracks (||D0^{-1}||_inf, ||S^{-1}||_inf) are available for reporting.
struct InterpolationSystem {
    std::vector<TorusPoint> support;
    int f_lo = 0;
    MatrixXd d0, d1, d2;
    MatrixXd d0_inv;
    MatrixXd schur, schur_inv;
    double kappa = 0.0;  // |G''(0)| = pi^2 f_lo (f_lo+4)/3
    double d0_condition = 0.0;
    double schur_condition = 0.0;
    bool separation_ok = true;

    double lambda_lo() const { return 1.0 / f_lo; }
};

enum class CertificateKind { Q, Q1 };

/// A constructed certificate polynomial with its numerical audit.
/// For kind Q (sign interpolation): grid_max_offsupport is the maximum of |q|
/// over the far region and near_bound_margin the largest constant C with
/// |q(t)| <= 1 - C (t-t_j)^2 / lambda_lo^2 on the near balls (positive means
/// the quadratic bound holds).
/// For kind Q1 (linear interpolation): grid_max_offsupport is the maximum of
/// |q1| over the far region (compare against C * lambda_lo) and
/// near_bound_margin the smallest constant C with
/// |q1(t) - v_j (t-t_j)| <= C (t-t_j)^2 / lambda_lo on the near balls.
struct CertificateReport {
    CertificateKind kind = CertificateKind::Q;
    VectorXcd alpha, beta;
    TrigPoly poly;
    double interp_residual = 0.0;
    double grid_max_offsupport = 0.0;
    double near_bound_margin = 0.0;
    std::pair<double, double> coeff_bounds{0.0, 0.0};  // (||alpha||_inf, ||beta||_inf)
};

/// Grid audit of the sign certificate against the interpolation bounds.
struct VerificationSummary {
    double max_far = 0.0;        // max |q| over the far region
    double far_margin = 0.0;     // 1 - max_far
    double c_a_hat = 0.0;        // largest C_a with |q| <= 1 - C_a d^2/lambda^2 near
    double c_lemma5_hat = 0.0;   // smallest C with |q - v_j| <= C d^2/lambda^2 near
    int grid_points = 0;
};

namespace detail {

inline double inf_norm(const MatrixXd& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double condition_2norm(const MatrixXd& m) {
    Eigen::JacobiSVD<MatrixXd> svd(m);
    const double smin = svd.singularValues().minCoeff();
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return svd.singularValues().maxCoeff() / smin;
}

inline double support_min_separation(const std::vector<TorusPoint>& pts) {
    if (pts.size() < 2) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            best = std::min(best, wrap_distance(pts[i], pts[j]));
        }
    }
    return best;
}

}  // namespace detail

inline InterpolationSystem build_system(const std::vector<TorusPoint>& support, int f_lo,
                                        const CertificateOptions& opts = {}) {
    if (support.empty()) throw std::invalid_argument("build_system: empty support");
    SquaredFejerKernel g(f_lo);

    InterpolationSystem sys;
    sys.support = support;
    sys.f_lo = f_lo;
    sys.kappa = g.kappa();

    const double sep = detail::support_min_separation(support);
    const double required = 2.0 / f_lo;
    sys.separation_ok = sep >= required;
    if (!sys.separation_ok && opts.strict_separation) {
        throw SeparationViolation(sep, required);
    }

    const int k = static_cast<int>(support.size());
    sys.d0.resize(k, k);
    sys.d1.resize(k, k);
    sys.d2.resize(k, k);
    for (int j = 0; j < k; ++j) {
        for (int l = 0; l < k; ++l) {
            const TorusPoint d(support[static_cast<std::size_t>(j)].value -
                               support[static_cast<std::size_t>(l)].value);
            sys.d0(j, l) = g.eval(0, d);
            sys.d1(j, l) = g.eval(1, d);
            sys.d2(j, l) = g.eval(2, d);
        }
    }

    sys.d0_condition = detail::condition_2norm(sys.d0);
    if (!std::isfinite(sys.d0_condition) || sys.d0_condition > opts.condition_limit) {
        throw SingularSystem("build_system: D0 numerically singular (condition " +
                             std::to_string(sys.d0_condition) + ")");
    }
    sys.d0_inv = sys.d0.inverse();
    sys.schur = sys.d2 - sys.d1 * sys.d0_inv * sys.d1;
    sys.schur_condition = detail::condition_2norm(sys.schur);
    if (!std::isfinite(sys.schur_condition) || sys.schur_condition > opts.condition_limit) {
        throw SingularSystem("build_system: Schur complement numerically singular (condition " +
                             std::to_string(sys.schur_condition) + ")");
    }
    sys.schur_inv = sys.schur.inverse();
    return sys;
}

namespace detail {

/// Solves [D0 D1; D1 D2][alpha; beta] = [top; bottom] through D0^{-1} and the
/// Schur complement. The matrices are real, so the complex right-hand side
/// splits into independent real and imaginary solves.
inline std::pair<VectorXcd, VectorXcd> solve_block(const InterpolationSystem& sys,
                                                   const VectorXcd& top,
                                                   const VectorXcd& bottom) {
    auto solve_real = [&](const VectorXd& t, const VectorXd& b) {
        VectorXd rhs = b - sys.d1 * (sys.d0_inv * t);
        VectorXd beta = sys.schur_inv * rhs;
        VectorXd alpha = sys.d0_inv * (t - sys.d1 * beta);
        return std::make_pair(alpha, beta);
    };
    auto [ar, br] = solve_real(top.real(), bottom.real());
    auto [ai, bi] = solve_real(top.imag(), bottom.imag());
    VectorXcd alpha = ar.cast<Complex>() + Complex(0, 1) * ai.cast<Complex>();
    VectorXcd beta = br.cast<Complex>() + Complex(0, 1) * bi.cast<Complex>();
    return {alpha, beta};
}

/// q(t) = sum_k alpha_k G(t - t_k) + beta_k G'(t - t_k) as a coefficient
/// vector: q_hat(m) = g_hat(m) [A(m) + i 2 pi m B(m)] with A, B the support
/// exponential sums of alpha, beta.
inline TrigPoly certificate_poly(const InterpolationSystem& sys, const VectorXcd& alpha,
                                 const VectorXcd& beta) {
    SquaredFejerKernel g(sys.f_lo);
    const int f = sys.f_lo;
    std::vector<Complex> coeffs(static_cast<std::size_t>(2 * f + 1), Complex(0.0));
    for (int m = -f; m <= f; ++m) {
        Complex a_sum(0.0), b_sum(0.0);
        for (std::size_t k = 0; k < sys.support.size(); ++k) {
            const Complex e = std::polar(1.0, -kTwoPi * m * sys.support[k].value);
            a_sum += alpha[static_cast<Eigen::Index>(k)] * e;
            b_sum += beta[static_cast<Eigen::Index>(k)] * e;
        }
        coeffs[static_cast<std::size_t>(m + f)] =
            g.fourier_coeffs()[static_cast<std::size_t>(m + f)] *
            (a_sum + Complex(0.0, kTwoPi * m) * b_sum);
    }
    return TrigPoly(f, std::move(coeffs));
}

struct FarNearScan {
    double max_far = 0.0;
    double c_a_min = std::numeric_limits<double>::infinity();   // min of (1-|q|) lam^2/d^2
    double c_l5_max = 0.0;                                      // max of |q - v_j| lam^2/d^2
    double q1_far_max = 0.0;
    double q1_near_max = 0.0;  // max of |q1 - v_j d_signed| lam/d^2
    int grid_points = 0;
};

}  // namespace detail

inline void check_unit_modulus(const VectorXcd& v) {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (std::fabs(std::abs(v[j]) - 1.0) > 1e-9) {
            throw std::invalid_argument("certificate: sign pattern entries must have unit modulus");
        }
    }
}

/// Builds the sign-interpolating certificate: q(t_j) = v_j, q'(t_j) = 0.
inline CertificateReport build_q(const InterpolationSystem& sys, const VectorXcd& v,
                                 const CertificateOptions& opts = {}) {
    check_unit_modulus(v);
    const auto k = static_cast<Eigen::Index>(sys.support.size());
    if (v.size() != k) throw std::invalid_argument("build_q: sign pattern size mismatch");

    auto [alpha, beta] = detail::solve_block(sys, v, VectorXcd::Zero(k));

    CertificateReport rep;
    rep.kind = CertificateKind::Q;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.poly = detail::certificate_poly(sys, alpha, beta);
    rep.coeff_bounds = {alpha.cwiseAbs().maxCoeff(), beta.cwiseAbs().maxCoeff()};

    const TrigPoly dq = rep.poly.derivative();
    double res = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        const TorusPoint tj = sys.support[static_cast<std::size_t>(j)];
        res = std::max(res, std::abs(rep.poly.eval(tj) - v[j]));
        res = std::max(res, std::abs(dq.eval(tj)));
    }
    rep.interp_residual = res;

    const VerificationSummary sum = [&] {
        VerificationSummary s;
        const int n_grid = std::max(1024, opts.grid_density * sys.f_lo);
        Partition part(sys.lambda_lo(), sys.support);
        const double lam2 = sys.lambda_lo() * sys.lambda_lo();
        s.grid_points = n_grid;
        s.c_a_hat = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_grid; ++i) {
            const TorusPoint t(double(i) / n_grid);
            const double qa = std::abs(rep.poly.eval(t));
            const auto [j, d] = part.nearest(t);
            if (d > part.near_radius) {
                s.max_far = std::max(s.max_far, qa);
            } else if (d > 1e-9) {
                s.c_a_hat = std::min(s.c_a_hat, (1.0 - qa) * lam2 / (d * d));
            }
        }
        s.far_margin = 1.0 - s.max_far;
        return s;
    }();
    rep.grid_max_offsupport = sum.max_far;
    rep.near_bound_margin = sum.c_a_hat;
    return rep;
}

/// Builds the locally-linear certificate: q1(t_j) = 0, q1'(t_j) = v_j.
inline CertificateReport build_q1(const InterpolationSystem& sys, const VectorXcd& v,
                                  const CertificateOptions& opts = {}) {
    check_unit_modulus(v);
    const auto k = static_cast<Eigen::Index>(sys.support.size());
    if (v.size() != k) throw std::invalid_argument("build_q1: sign pattern size mismatch");

    auto [alpha, beta] = detail::solve_block(sys, VectorXcd::Zero(k), v);

    CertificateReport rep;
    rep.kind = CertificateKind::Q1;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.poly = detail::certificate_poly(sys, alpha, beta);
    rep.coeff_bounds = {alpha.cwiseAbs().maxCoeff(), beta.cwiseAbs().maxCoeff()};

    const TrigPoly dq = rep.poly.derivative();
    double res = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        const TorusPoint tj = sys.support[static_cast<std::size_t>(j)];
        res = std::max(res, std::abs(rep.poly.eval(tj)));
        res = std::max(res, std::abs(dq.eval(tj) - v[j]));
    }
    rep.interp_residual = res;

    const int n_grid = std::max(1024, opts.grid_density * sys.f_lo);
    Partition part(sys.lambda_lo(), sys.support);
    const double lam = sys.lambda_lo();
    double far_max = 0.0;
    double near_c = 0.0;
    for (int i = 0; i < n_grid; ++i) {
        const TorusPoint t(double(i) / n_grid);
        const double qa = std::abs(rep.poly.eval(t));
        const auto [j, d] = part.nearest(t);
        if (d > part.near_radius) {
            far_max = std::max(far_max, qa);
        } else if (d > 1e-9) {
            // signed offset to the assigned support point, wrapped to (-1/2, 1/2]
            double off = t.value - sys.support[static_cast<std::size_t>(j)].value;
            off -= std::round(off);
            const Complex lin = v[static_cast<Eigen::Index>(j)] * off;
            near_c = std::max(near_c, std::abs(rep.poly.eval(t) - lin) * lam / (d * d));
        }
    }
    rep.grid_max_offsupport = far_max;
    rep.near_bound_margin = near_c;
    return rep;
}

/// Grid audit of a sign certificate: far-region maximum, the fitted quadratic
/// constants, and the margins. Failures show up as nonpositive margins rather
/// than exceptions. The sign pattern is read back from the polynomial at the
/// support (the interpolation residual is orders of magnitude below any
/// margin of interest).
inline VerificationSummary verify_certificate(const CertificateReport& report,
                                              const std::vector<TorusPoint>& support, int f_lo,
                                              int grid_density) {
    VerificationSummary s;
    const int n_grid = std::max(1024, grid_density * f_lo);
    s.grid_points = n_grid;
    Partition part(1.0 / f_lo, support);
    const double lam2 = 1.0 / (double(f_lo) * f_lo);

    std::vector<Complex> vj(support.size());
    for (std::size_t j = 0; j < support.size(); ++j) vj[j] = report.poly.eval(support[j]);

    s.c_a_hat = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_grid; ++i) {
        const TorusPoint t(double(i) / n_grid);
        const Complex q = report.poly.eval(t);
        const double qa = std::abs(q);
        const auto [j, d] = part.nearest(t);
        if (d > part.near_radius) {
            s.max_far = std::max(s.max_far, qa);
        } else if (d > 1e-9) {
            s.c_a_hat = std::min(s.c_a_hat, (1.0 - qa) * lam2 / (d * d));
            s.c_lemma5_hat = std::max(s.c_lemma5_hat, std::abs(q - vj[j]) * lam2 / (d * d));
        }
    }
    s.far_margin = 1.0 - s.max_far;
    return s;
}

}  // namespace superres
