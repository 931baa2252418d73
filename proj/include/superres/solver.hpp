#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "superres/errors.hpp"
#include "superres/measurement.hpp"
#include "superres/torus.hpp"
#include "superres/trig_poly.hpp"

namespace superres {

using Eigen::Index;
using Eigen::MatrixXcd;

struct SolverOptions {
    // SDP (operator splitting)
    double psd_tol = 1e-8;
    double eq_tol = 1e-8;
    std::size_t max_iter = 400000;
    double rho = 1.0;              // initial penalty; adapted by residual balancing
    double over_relaxation = 1.7;  // in (0, 2)

    // support extraction
    double support_tol = 1e-4;     // threshold on 1 - |q|^2
    int support_grid_density = 64; // screening grid has this * f_lo points
    double cluster_radius = 0.05;  // merge maxima closer than this * lambda_lo
    int newton_max_iter = 50;
    double degenerate_fraction = 0.25;  // |q| ~ 1 on this much of the grid => degenerate

    // amplitude fit
    double amp_prune_rel = 1e-10;  // drop spikes below this * max |a|
    double cond_limit = 1e12;

    // recovery diagnostics
    double gap_tol_rel = 1e-4;
    double gap_tol_abs = 1e-8;
    double feas_tol = 1e-6;

    // grid-Lasso oracle
    double oracle_gap_tol = 1e-6;
    std::size_t oracle_max_iter = 400000;
};

/// Solution of the dual semidefinite program
///   max Re[(F_lo y)* u] - delta ||u||_2
///   s.t. [[X, u], [u*, 1]] >= 0,  sum_i X_{i,i+j} = (j == 0),
/// together with the measured constraint violations of the reported iterate.
struct DualSolution {
    VectorXcd u;
    MatrixXcd X;
    double objective = 0.0;
    double gap = 0.0;  // convergence gap estimate; recover() replaces it with
                       // tv_norm(estimate) - objective
    double psd_violation = 0.0;
    double trace_violation = 0.0;
    std::size_t iterations = 0;
};

struct RecoveryResult {
    SpikeTrain estimate;
    TrigPoly dual_poly;  // q = F*_lo u, cutoff f_lo
    DualSolution dual;
    double support_threshold_used = 0.0;
    bool degenerate_dual = false;
};

namespace detail {

/// Projects the X block of a Hermitian (n+1)x(n+1) matrix onto the Toeplitz
/// trace constraints (sum of diagonal j equals 1 for j=0, else 0) and pins the
/// corner to 1. Orthogonal projection shifts each diagonal by its mean excess.
inline void project_trace_constraints(MatrixXcd& z, int n) {
    const double excess0 = (z.topLeftCorner(n, n).diagonal().real().sum() - 1.0) / n;
    for (int i = 0; i < n; ++i) z(i, i) = Complex(z(i, i).real() - excess0, 0.0);
    for (int j = 1; j < n; ++j) {
        Complex sum(0.0);
        for (int i = 0; i + j < n; ++i) sum += z(i, i + j);
        const Complex shift = sum / double(n - j);
        for (int i = 0; i + j < n; ++i) {
            z(i, i + j) -= shift;
            z(i + j, i) = std::conj(z(i, i + j));
        }
    }
    z(n, n) = Complex(1.0, 0.0);
}

/// Nearest positive semidefinite matrix in Frobenius norm, via a Hermitian
/// eigendecomposition. Reconstructs from whichever sign class has fewer
/// eigenvalues.
inline MatrixXcd project_psd(const MatrixXcd& m) {
    MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
    const auto& lam = es.eigenvalues();
    const auto& vec = es.eigenvectors();
    const Index n = lam.size();
    Index first_pos = n;
    for (Index i = 0; i < n; ++i) {
        if (lam[i] > 0.0) {
            first_pos = i;
            break;
        }
    }
    const Index n_pos = n - first_pos;
    const Index n_neg = first_pos;
    if (n_pos <= n_neg) {
        if (n_pos == 0) return MatrixXcd::Zero(n, n);
        MatrixXcd vp = vec.rightCols(n_pos);
        return vp * lam.tail(n_pos).asDiagonal() * vp.adjoint();
    }
    if (n_neg == 0) return h;
    MatrixXcd vn = vec.leftCols(n_neg);
    return h - vn * lam.head(n_neg).asDiagonal() * vn.adjoint();
}

inline double max_trace_violation(const MatrixXcd& z, int n) {
    double v = std::fabs(z.topLeftCorner(n, n).diagonal().real().sum() - 1.0);
    for (int j = 1; j < n; ++j) {
        Complex sum(0.0);
        for (int i = 0; i + j < n; ++i) sum += z(i, i + j);
        v = std::max(v, std::abs(sum));
    }
    return v;
}

}  // namespace detail

/// Solves the dual SDP by ADMM-style operator splitting: one side projects
/// onto the trace constraints and applies the closed-form prox of the
/// objective in u (a shift by the data followed by norm-ball shrinkage), the
/// other projects onto the PSD cone through a dense Hermitian
/// eigendecomposition. Residual balancing adapts the penalty; the data is
/// normalized to unit l2 norm so tolerances are scale-free.
///
/// Either side of the splitting may end up as the reported iterate: the
/// constraint side satisfies the trace equalities exactly and its PSD
/// violation is bounded by the splitting residual, while the PSD side is
/// exactly PSD and its trace violation often converges much faster on
/// instances where the fixed-point residual crawls (near-degenerate duals).
/// Violations of the reported iterate are always measured directly.
inline DualSolution solve_dual(const Measurement& m, const SolverOptions& opts = {}) {
    const int n = m.n();
    const double scale = m.samples.norm();
    const VectorXcd eta = scale > 0.0 ? VectorXcd(m.samples / scale) : VectorXcd(m.samples);
    const double delta = scale > 0.0 ? m.delta / scale : m.delta;

    MatrixXcd zp = MatrixXcd::Zero(n + 1, n + 1);  // PSD-side iterate
    zp.topLeftCorner(n, n).diagonal().setConstant(Complex(1.0 / n, 0.0));
    zp(n, n) = Complex(1.0, 0.0);
    MatrixXcd zf = zp;                             // constraint/objective-side iterate
    MatrixXcd dual_var = MatrixXcd::Zero(n + 1, n + 1);

    double rho = opts.rho;
    const double alpha = opts.over_relaxation;
    const double tol = 0.5 * std::min(opts.psd_tol, opts.eq_tol);

    double res_primal = std::numeric_limits<double>::infinity();
    double res_dual = std::numeric_limits<double>::infinity();
    std::size_t iter = 0;
    bool use_psd_side = false;
    bool converged = false;

    for (; iter < opts.max_iter; ++iter) {
        // prox of the affine constraints + objective term
        zf = zp - dual_var;
        detail::project_trace_constraints(zf, n);
        {
            VectorXcd u = zf.col(n).head(n) + eta / (2.0 * rho);
            const double norm_u = u.norm();
            const double shrink = norm_u > 0.0 ? std::max(0.0, 1.0 - delta / (2.0 * rho * norm_u))
                                               : 0.0;
            u *= shrink;
            zf.col(n).head(n) = u;
            zf.row(n).head(n) = u.adjoint();
        }

        // PSD projection with over-relaxation
        const MatrixXcd zp_prev = zp;
        const MatrixXcd relaxed = alpha * zf + (1.0 - alpha) * zp_prev;
        zp = detail::project_psd(relaxed + dual_var);
        dual_var += relaxed - zp;

        res_primal = (zf - zp).norm();
        res_dual = rho * (zp - zp_prev).norm();
        if (res_primal <= tol && res_dual <= tol) {
            converged = true;
            ++iter;
            break;
        }
        if (iter % 100 == 99 && res_primal <= 1e-6 && res_dual <= 1e-6 &&
            detail::max_trace_violation(zp, n) <= 0.9 * opts.eq_tol) {
            use_psd_side = true;
            converged = true;
            ++iter;
            break;
        }

        // residual balancing (frozen later so the fixed point can settle)
        if (iter % 50 == 49 && iter < 20000) {
            if (res_primal > 10.0 * res_dual) {
                rho *= 2.0;
                dual_var *= 0.5;
            } else if (res_dual > 10.0 * res_primal) {
                rho *= 0.5;
                dual_var *= 2.0;
            }
        }
    }

    if (!converged) throw NonConvergence(iter, res_primal, res_dual);

    const MatrixXcd& reported = use_psd_side ? zp : zf;
    DualSolution sol;
    sol.u = reported.col(n).head(n);
    sol.X = reported.topLeftCorner(n, n);
    sol.objective = std::real(m.samples.dot(sol.u)) - m.delta * sol.u.norm();
    sol.gap = res_primal + res_dual;
    sol.iterations = iter;
    sol.trace_violation = detail::max_trace_violation(reported, n);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(reported, Eigen::EigenvaluesOnly);
    sol.psd_violation = std::max(0.0, -es.eigenvalues().minCoeff());
    return sol;
}

/// Dual polynomial q = F*_lo u of a dual solution.
inline TrigPoly dual_polynomial(const DualSolution& sol) {
    const int n = static_cast<int>(sol.u.size());
    const int f = (n - 1) / 2;
    std::vector<Complex> c(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = sol.u[i];
    return TrigPoly(f, std::move(c));
}

struct SupportScan {
    std::vector<TorusPoint> points;
    bool degenerate = false;       // |q| ~ 1 on a macroscopic part of the circle
    double near_one_fraction = 0.0;
};

namespace detail {

/// Polishes a local maximum of the real trig polynomial msq (= |q|^2) inside
/// [t0 - h, t0 + h] by Newton on its derivative, clamped to the bracket.
inline double polish_maximum(const TrigPoly& msq_d1, const TrigPoly& msq_d2, double t0, double h,
                             int max_iter) {
    double t = t0;
    for (int it = 0; it < max_iter; ++it) {
        const double g = msq_d1.eval(t).real();
        const double gg = msq_d2.eval(t).real();
        if (!(gg < 0.0)) break;  // not locally concave; keep the grid point
        double next = t - g / gg;
        next = std::clamp(next, t0 - h, t0 + h);
        if (std::fabs(next - t) < 1e-15) {
            t = next;
            break;
        }
        t = next;
    }
    return t;
}

}  // namespace detail

/// Locates the near-unit-modulus local maxima of |q|^2: grid screening at
/// support_grid_density * f_lo points, Newton refinement on d|q|^2/dt, then
/// merging of maxima closer than cluster_radius * lambda_lo to their
/// |q|-weighted circular centroid.
inline SupportScan scan_support(const TrigPoly& q, const SolverOptions& opts = {}) {
    SupportScan out;
    const int f = q.cutoff();
    const double lambda_lo = 1.0 / std::max(1, f);
    const TrigPoly msq = q.modulus_sq();
    const TrigPoly msq_d1 = msq.derivative();
    const TrigPoly msq_d2 = msq_d1.derivative();

    const int n_grid = std::max(256, opts.support_grid_density * f);
    std::vector<double> vals(static_cast<std::size_t>(n_grid));
    int near_one = 0;
    const double threshold = 1.0 - opts.support_tol;
    // |q|^2 has cutoff 2f, so by the Bernstein bound it can dip by at most
    // (4 pi f)^2 (h/2)^2 / 2 between samples at spacing h; screen with that
    // margin and enforce the strict threshold on the polished maximum.
    const double grid_dip = 2.0 * std::pow(kTwoPi * f / n_grid, 2.0);
    const double screen_threshold = threshold - grid_dip;
    for (int i = 0; i < n_grid; ++i) {
        vals[static_cast<std::size_t>(i)] = msq.eval(double(i) / n_grid).real();
        if (vals[static_cast<std::size_t>(i)] >= threshold) ++near_one;
    }
    out.near_one_fraction = double(near_one) / n_grid;
    if (out.near_one_fraction > opts.degenerate_fraction) {
        out.degenerate = true;
        return out;
    }

    std::vector<std::pair<double, double>> candidates;  // (location, |q|)
    for (int i = 0; i < n_grid; ++i) {
        const double v = vals[static_cast<std::size_t>(i)];
        const double prev = vals[static_cast<std::size_t>((i + n_grid - 1) % n_grid)];
        const double next = vals[static_cast<std::size_t>((i + 1) % n_grid)];
        if (v >= screen_threshold && v > prev && v >= next) {
            const double t = detail::polish_maximum(msq_d1, msq_d2, double(i) / n_grid,
                                                    1.0 / n_grid, opts.newton_max_iter);
            const double polished = msq.eval(t).real();
            if (polished >= threshold) {
                candidates.emplace_back(wrap_unit(t), std::sqrt(std::max(0.0, polished)));
            }
        }
    }
    if (candidates.empty()) return out;
    std::sort(candidates.begin(), candidates.end());

    // cluster neighbouring detections (including across the wrap)
    const double merge_dist = opts.cluster_radius * lambda_lo;
    std::vector<std::vector<std::pair<double, double>>> clusters;
    for (const auto& c : candidates) {
        if (!clusters.empty() &&
            wrap_distance(TorusPoint(clusters.back().back().first), TorusPoint(c.first)) <
                merge_dist) {
            clusters.back().push_back(c);
        } else {
            clusters.push_back({c});
        }
    }
    if (clusters.size() >= 2) {
        const auto& first = clusters.front().front();
        const auto& last = clusters.back().back();
        if (wrap_distance(TorusPoint(first.first), TorusPoint(last.first)) < merge_dist) {
            for (const auto& c : clusters.back()) clusters.front().push_back(c);
            clusters.pop_back();
        }
    }
    for (const auto& cluster : clusters) {
        const double ref = cluster.front().first;
        double wsum = 0.0, pos = 0.0;
        for (const auto& [t, w] : cluster) {
            double off = t - ref;
            off -= std::round(off);
            pos += w * off;
            wsum += w;
        }
        out.points.emplace_back(ref + pos / wsum);
    }
    std::sort(out.points.begin(), out.points.end(),
              [](TorusPoint a, TorusPoint b) { return a.value < b.value; });
    return out;
}

inline std::vector<TorusPoint> extract_support(const TrigPoly& q, const SolverOptions& opts = {}) {
    return scan_support(q, opts).points;
}

namespace detail {

inline MatrixXcd forward_matrix(int f_lo, const std::vector<TorusPoint>& support) {
    const int n = 2 * f_lo + 1;
    MatrixXcd fm(n, static_cast<Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) {
        for (int k = -f_lo; k <= f_lo; ++k) {
            fm(k + f_lo, static_cast<Index>(j)) = std::polar(1.0, -kTwoPi * k * support[j].value);
        }
    }
    return fm;
}

inline VectorXcd soft_threshold(const VectorXcd& v, double tau) {
    VectorXcd out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        out[i] = a > tau ? v[i] * ((a - tau) / a) : Complex(0.0);
    }
    return out;
}

/// Normal equations of a fixed design matrix, shared across every penalty
/// level of a bisection.
struct LassoWorkspace {
    MatrixXcd gram;  // fa^H fa
    VectorXcd atb;   // fa^H y
};

inline LassoWorkspace make_lasso_workspace(const MatrixXcd& fa, const VectorXcd& y) {
    return {fa.adjoint() * fa, fa.adjoint() * y};
}

/// IRLS for min 0.5 ||fa a - y||^2 + lambda ||a||_1: every step solves the
/// weighted normal equations exactly (the problems here are small and dense),
/// with the smoothing floor annealed towards zero. Robust to the badly
/// conditioned dictionaries that defeat plain first-order iterations.
inline VectorXcd irls_lasso(const LassoWorkspace& ws, double lambda, VectorXcd a, int iters) {
    const Index s = ws.gram.cols();
    double floor_w = std::max(1e-3 * a.cwiseAbs().maxCoeff(), 1e-6);
    for (int it = 0; it < iters; ++it) {
        MatrixXcd weighted = ws.gram;
        for (Index j = 0; j < s; ++j) {
            weighted(j, j) += lambda / std::max(std::abs(a[j]), floor_w);
        }
        a = weighted.ldlt().solve(ws.atb);
        if (it % 5 == 4) floor_w = std::max(floor_w * 0.056, 1e-15);
    }
    return a;
}

}  // namespace detail

/// Fits amplitudes on a fixed support: minimum sum of moduli subject to the
/// l2 data constraint, solved by a penalized path with bisection on the
/// penalty so the residual lands on the constraint boundary. With delta = 0
/// (or a support whose least-squares fit cannot reach delta) the fit falls
/// back to the least-squares solution, minimum-norm if underdetermined.
/// Spikes below amp_prune_rel * max |a| are dropped.
inline SpikeTrain fit_amplitudes(const Measurement& m, const std::vector<TorusPoint>& support,
                                 const SolverOptions& opts = {}) {
    if (support.empty()) return SpikeTrain();
    if (static_cast<int>(support.size()) > m.n()) {
        throw std::invalid_argument("fit_amplitudes: more support points than measurements");
    }
    const MatrixXcd fm = detail::forward_matrix(m.f_lo, support);
    Eigen::JacobiSVD<MatrixXcd> svd(fm, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues().maxCoeff();
    const double smin = svd.singularValues().minCoeff();
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(cond <= opts.cond_limit)) throw IllConditioned(cond);

    VectorXcd amps;
    const VectorXcd ls = svd.solve(m.samples);
    const double ls_residual = (fm * ls - m.samples).norm();
    if (m.delta <= 0.0 || ls_residual >= m.delta) {
        amps = ls;
    } else if (m.samples.norm() <= m.delta) {
        amps = VectorXcd::Zero(fm.cols());
    } else {
        // residual is nondecreasing in the penalty: bisect to the boundary
        const detail::LassoWorkspace ws = detail::make_lasso_workspace(fm, m.samples);
        double lo = 0.0, hi = (fm.adjoint() * m.samples).cwiseAbs().maxCoeff();
        VectorXcd a = ls;
        VectorXcd best = ls;
        for (int round = 0; round < 60; ++round) {
            const double lambda = 0.5 * (lo + hi);
            a = detail::irls_lasso(ws, lambda, a, 80);
            const double r = (fm * a - m.samples).norm();
            if (r <= m.delta) {
                best = a;
                lo = lambda;
            } else {
                hi = lambda;
            }
            if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
        }
        amps = best;
    }

    const double amax = amps.size() > 0 ? amps.cwiseAbs().maxCoeff() : 0.0;
    std::vector<Spike> spikes;
    for (Index j = 0; j < amps.size(); ++j) {
        if (std::abs(amps[j]) >= opts.amp_prune_rel * amax && std::abs(amps[j]) > 0.0) {
            spikes.push_back({support[static_cast<std::size_t>(j)], amps[j]});
        }
    }
    return SpikeTrain(std::move(spikes));
}

namespace detail {

/// Gauss-Newton on the data residual over spike locations, amplitudes
/// eliminated by least squares each step. Displacements are clamped to a
/// small fraction of lambda_lo: this polishes the numerical precision of the
/// dual-polynomial argmax locations, it does not re-estimate the support.
inline std::vector<TorusPoint> refine_support(const Measurement& m,
                                              std::vector<TorusPoint> support, int steps,
                                              double max_total_move) {
    const auto s = static_cast<Index>(support.size());
    const std::vector<TorusPoint> initial = support;
    const int n = m.n();
    for (int it = 0; it < steps; ++it) {
        const MatrixXcd fm = forward_matrix(m.f_lo, support);
        Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(fm);
        const VectorXcd amp = cod.solve(m.samples);
        const VectorXcd r = fm * amp - m.samples;
        MatrixXcd jac(n, s);
        for (Index j = 0; j < s; ++j) {
            for (int k = -m.f_lo; k <= m.f_lo; ++k) {
                jac(k + m.f_lo, j) = amp[j] * Complex(0.0, -kTwoPi * k) * fm(k + m.f_lo, j);
            }
        }
        // real step: stack real and imaginary parts of J dt = -r
        Eigen::MatrixXd js(2 * n, s);
        js << jac.real(), jac.imag();
        Eigen::VectorXd rs(2 * n);
        rs << r.real(), r.imag();
        const Eigen::VectorXd dt = js.colPivHouseholderQr().solve(-rs);
        double moved = 0.0;
        for (Index j = 0; j < s; ++j) {
            double target = support[static_cast<std::size_t>(j)].value + dt[j];
            // cap the cumulative displacement from the extracted location
            double off = target - initial[static_cast<std::size_t>(j)].value;
            off -= std::round(off);
            off = std::clamp(off, -max_total_move, max_total_move);
            support[static_cast<std::size_t>(j)] = TorusPoint(initial[static_cast<std::size_t>(j)].value + off);
            moved = std::max(moved, std::fabs(dt[j]));
        }
        if (moved < 1e-15) break;
    }
    return support;
}

}  // namespace detail

/// Full pipeline: dual SDP -> support from the dual polynomial -> amplitude
/// fit. When the fit cannot meet the noise budget because the extracted
/// locations carry the dual solve's numerical error (noiseless instances with
/// tiny delta), a clamped Gauss-Newton polish of the locations runs once and
/// the fit is repeated. The reported gap is tv_norm(estimate) - objective.
inline RecoveryResult recover(const Measurement& m, const SolverOptions& opts = {}) {
    RecoveryResult out;
    out.dual = solve_dual(m, opts);
    out.dual_poly = dual_polynomial(out.dual);
    out.support_threshold_used = opts.support_tol;
    const SupportScan scan = scan_support(out.dual_poly, opts);
    out.degenerate_dual = scan.degenerate;
    if (!scan.degenerate && !scan.points.empty()) {
        out.estimate = fit_amplitudes(m, scan.points, opts);
        if (m.delta > 0.0 && residual_norm(m, out.estimate) > m.delta * (1.0 + opts.feas_tol)) {
            const double lambda_lo = 1.0 / m.f_lo;
            const std::vector<TorusPoint> refined =
                detail::refine_support(m, scan.points, 10, 0.05 * lambda_lo);
            const SpikeTrain candidate = fit_amplitudes(m, refined, opts);
            if (residual_norm(m, candidate) < residual_norm(m, out.estimate)) {
                out.estimate = candidate;
            }
        }
    }
    out.dual.gap = tv_norm(out.estimate) - out.dual.objective;
    return out;
}

struct GridLassoResult {
    double value = 0.0;
    VectorXcd solution;       // amplitudes on the uniform grid
    double duality_gap = 0.0;
    std::size_t iterations = 0;
};

/// Independent verification oracle: the data-constrained l1 problem
/// restricted to a uniform grid, solved by column generation with
/// non-maximum-suppressed pricing. While the active set cannot reach the
/// constraint ball, growth follows the least-squares residual. Once feasible,
/// Chambolle-Pock runs on the active set; its dual iterate and the
/// KKT-aligned residual direction give two dual candidates, each rescaled by
/// its full-grid sup-norm, certifying the duality gap and pricing further
/// columns. Shares no code with the SDP path.
inline GridLassoResult grid_lasso_oracle(const Measurement& m, int grid_size,
                                         const SolverOptions& opts = {}) {
    if (grid_size < 4 * m.n()) {
        throw std::invalid_argument("grid_lasso_oracle: grid_size must be >= 4*(2 f_lo + 1)");
    }
    GridLassoResult out;
    out.solution = VectorXcd::Zero(grid_size);
    std::vector<TorusPoint> grid(static_cast<std::size_t>(grid_size));
    for (int g = 0; g < grid_size; ++g) {
        grid[static_cast<std::size_t>(g)] = TorusPoint(double(g) / grid_size);
    }
    const MatrixXcd fm = detail::forward_matrix(m.f_lo, grid);
    const VectorXcd& y = m.samples;
    const double delta = std::max(0.0, m.delta);
    if (y.norm() <= delta) return out;

    const int nms_window = std::max(2, grid_size / (16 * m.n()));
    std::vector<bool> active(static_cast<std::size_t>(grid_size), false);
    std::vector<int> cols;
    auto grow = [&](const VectorXcd& correlate, int count) {
        const Eigen::VectorXd score = correlate.cwiseAbs();
        std::vector<int> order(static_cast<std::size_t>(grid_size));
        for (int g = 0; g < grid_size; ++g) order[static_cast<std::size_t>(g)] = g;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return score[a] > score[b]; });
        std::vector<int> picked;
        for (int g : order) {
            if (static_cast<int>(picked.size()) >= count) break;
            if (active[static_cast<std::size_t>(g)]) continue;
            bool suppressed = false;
            for (int p : picked) {
                const int d = std::abs(p - g);
                if (std::min(d, grid_size - d) <= nms_window) {
                    suppressed = true;
                    break;
                }
            }
            if (!suppressed) {
                picked.push_back(g);
                active[static_cast<std::size_t>(g)] = true;
                cols.push_back(g);
            }
        }
        return !picked.empty();
    };
    grow(fm.adjoint() * y, 6);

    VectorXcd a, v = VectorXcd::Zero(m.n());
    std::size_t used = 0;
    for (int round = 0; round < 256 && used < opts.oracle_max_iter; ++round) {
        MatrixXcd fa(m.n(), static_cast<Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            fa.col(static_cast<Index>(j)) = fm.col(cols[j]);
        }
        VectorXcd a_warm = VectorXcd::Zero(static_cast<Index>(cols.size()));
        a_warm.head(a.size()) = a;
        a = std::move(a_warm);

        Eigen::JacobiSVD<MatrixXcd> svd(fa, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double sv_cut = 1e-10 * svd.singularValues().maxCoeff();
        VectorXcd ls = svd.matrixU().adjoint() * y;
        for (Index i = 0; i < ls.size(); ++i) {
            const double sv = svd.singularValues()[i];
            ls[i] = sv > sv_cut ? ls[i] / sv : Complex(0.0);
        }
        ls = svd.matrixV() * ls;
        const double ls_residual = (fa * ls - y).norm();
        if (ls_residual > delta) {
            // active set cannot reach the constraint ball yet
            if (!grow(fm.adjoint() * (y - fa * ls), 4)) break;
            used += 1;
            continue;
        }

        // feasible primal value: truncated-SVD correction through the active
        // columns, scaled to just reach the constraint ball
        auto feasible_primal = [&](VectorXcd& a_feas) {
            a_feas = a;
            const VectorXcd r = y - fa * a;
            if (r.norm() > delta) {
                VectorXcd z = svd.matrixU().adjoint() * r;
                for (Index i = 0; i < z.size(); ++i) {
                    const double sv = svd.singularValues()[i];
                    z[i] = sv > sv_cut ? z[i] / sv : Complex(0.0);
                }
                const VectorXcd corr = svd.matrixV() * z;
                const VectorXcd r_perp = r - fa * corr;
                double theta = 1.0;
                if (r_perp.norm() < delta) {
                    const double in_range = (r - r_perp).norm();
                    if (in_range > 0.0) {
                        theta = std::min(
                            1.0, 1.0 - std::sqrt(std::max(0.0, delta * delta -
                                                          r_perp.squaredNorm())) / in_range);
                    }
                }
                a_feas = a + theta * corr;
            }
            return a_feas.cwiseAbs().sum();
        };

        // safe operator-norm bound for the CP steps: unit-modulus entries
        // give ||fa||_2^2 <= n * |A|
        const double lip = std::sqrt(double(m.n()) * double(cols.size()));
        const double tau = 1.0 / lip, sigma = 1.0 / lip;
        VectorXcd abar = a;
        bool grown = false;
        for (std::size_t step = 0; step < 30000 && used < opts.oracle_max_iter && !grown;) {
            const std::size_t chunk = 500;
            for (std::size_t it = 0; it < chunk; ++it) {
                VectorXcd w = v + sigma * (fa * abar);
                VectorXcd c = w / sigma - y;
                const double cn = c.norm();
                const VectorXcd proj = y + (cn > delta ? (delta / cn) * c : c);
                v = w - sigma * proj;
                const VectorXcd g = a - tau * (fa.adjoint() * v);
                VectorXcd a_next = detail::soft_threshold(g, tau);
                abar = 2.0 * a_next - a;
                a = std::move(a_next);
            }
            step += chunk;
            used += chunk;

            VectorXcd a_feas;
            const double value = feasible_primal(a_feas);
            const double feasible =
                (fa * a_feas - y).norm() <= delta * (1.0 + 1e-9) + 1e-12;

            const VectorXcd corr_v = fm.adjoint() * v;
            const double sup_v = std::max(1.0, corr_v.cwiseAbs().maxCoeff());
            double dual = std::real((-v / sup_v).dot(y)) - delta * v.norm() / sup_v;
            const VectorXcd r_raw = y - fa * a;
            const VectorXcd corr_r = fm.adjoint() * r_raw;
            const double sup_r = corr_r.cwiseAbs().maxCoeff();
            if (sup_r > 1e-300) {
                dual = std::max(dual, (std::real(r_raw.dot(y)) - delta * r_raw.norm()) / sup_r);
            }
            out.duality_gap = value - dual;
            if (feasible && out.duality_gap <= opts.oracle_gap_tol) {
                out.value = value;
                for (std::size_t j = 0; j < cols.size(); ++j) {
                    out.solution[cols[j]] = a_feas[static_cast<Index>(j)];
                }
                out.iterations = used;
                return out;
            }

            // grow once the subset-restricted gap is resolved: price columns
            // by the dual polynomial of the better dual candidate
            const double sup_v_sub = std::max(1.0, (fa.adjoint() * v).cwiseAbs().maxCoeff());
            double dual_sub = std::real((-v / sup_v_sub).dot(y)) - delta * v.norm() / sup_v_sub;
            const double sup_r_sub = (fa.adjoint() * r_raw).cwiseAbs().maxCoeff();
            if (sup_r_sub > 1e-300) {
                dual_sub = std::max(dual_sub,
                                    (std::real(r_raw.dot(y)) - delta * r_raw.norm()) / sup_r_sub);
            }
            if (value - dual_sub <= std::max(0.25 * opts.oracle_gap_tol, 0.05 * out.duality_gap)) {
                grown = grow(sup_v >= sup_r ? corr_v : corr_r, 4);
                if (!grown) break;
            }
        }
        if (!grown) {
            if (!grow(fm.adjoint() * (y - fa * a), 4)) break;
        }
    }
    throw NonConvergence(used, out.duality_gap, 0.0);
}

}  // namespace superres
