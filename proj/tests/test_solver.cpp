#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "superres/certificate.hpp"
#include "superres/measurement.hpp"
#include "superres/solver.hpp"

using namespace superres;
using Catch::Approx;

namespace {

Measurement noiseless(const SpikeTrain& x, int f_lo, double delta = 1e-6) {
    Measurement m = measure(x, f_lo, NoiseSpec::none());
    m.delta = delta;
    return m;
}

}  // namespace

TEST_CASE("solve_dual on zero data") {
    Measurement m;
    m.f_lo = 4;
    m.samples = VectorXcd::Zero(9);
    m.delta = 1.0;
    DualSolution sol = solve_dual(m);
    CHECK(sol.objective == Approx(0.0).margin(1e-9));
    CHECK(sol.u.norm() <= 1e-6);
    CHECK(sol.psd_violation <= 1e-8);
    CHECK(sol.trace_violation <= 1e-8);
}

TEST_CASE("solve_dual noiseless single spike attains the TV norm") {
    SpikeTrain x({{TorusPoint(0.5), Complex(1, 0)}});
    DualSolution sol = solve_dual(noiseless(x, 8));
    CHECK(sol.objective == Approx(1.0).margin(1e-4));
    CHECK(sol.psd_violation <= 1e-8);
    CHECK(sol.trace_violation <= 1e-8);

    // cross-check the primal value with the independent grid oracle
    GridLassoResult oracle = grid_lasso_oracle(noiseless(x, 8), 64 * 8);
    CHECK(oracle.value == Approx(sol.objective).margin(1e-4));
}

TEST_CASE("solve_dual noiseless opposite pair at minimum separation") {
    SpikeTrain x({{TorusPoint(0.3), Complex(1, 0)},
                  {TorusPoint(0.3 + 2.0 / 16), Complex(-1, 0)}});
    DualSolution sol = solve_dual(noiseless(x, 16));
    CHECK(sol.objective == Approx(2.0).margin(1e-3));

    SolverOptions relaxed;
    relaxed.oracle_gap_tol = 2e-3;  // noiseless off-grid duals certify slowly
    GridLassoResult oracle = grid_lasso_oracle(noiseless(x, 16), 64 * 16, relaxed);
    CHECK(oracle.value >= sol.objective - 1e-6);
    CHECK(oracle.value == Approx(sol.objective).epsilon(1e-2));
}

TEST_CASE("dual polynomial is feasible and interpolates signs") {
    SpikeTrain x({{TorusPoint(0.12), Complex(1, 0)},
                  {TorusPoint(0.4), Complex(0, -1)},
                  {TorusPoint(0.75), Complex(-0.6, 0.8)}});
    const int f_lo = 12;
    Measurement m = noiseless(x, f_lo);
    DualSolution sol = solve_dual(m);
    TrigPoly q = dual_polynomial(sol);

    CHECK(q.sup_norm_grid(4096 * f_lo) <= 1.0 + 1e-6);

    // weak duality against the feasible ground truth
    CHECK(sol.objective <= tv_norm(x) + 1e-8);

    // sign interpolation at the true spikes (noiseless, well separated)
    for (const Spike& s : x.spikes()) {
        const Complex sign = s.amplitude / std::abs(s.amplitude);
        CHECK(std::abs(q.eval(s.location) - sign) <= 1e-3);
    }
}

TEST_CASE("extract_support") {
    SECTION("constant polynomial below one yields nothing") {
        TrigPoly q(4, std::vector<Complex>(9, Complex(0.0)));
        q.set_coeff(0, Complex(0.5, 0.0));
        CHECK(extract_support(q).empty());
    }
    SECTION("constant polynomial at one is degenerate") {
        TrigPoly q(4, std::vector<Complex>(9, Complex(0.0)));
        q.set_coeff(0, Complex(1.0, 0.0));
        SupportScan scan = scan_support(q);
        CHECK(scan.degenerate);
        CHECK(scan.points.empty());
    }
    SECTION("certificate polynomial localizes its support") {
        const std::vector<TorusPoint> support{TorusPoint(0.2), TorusPoint(0.7)};
        InterpolationSystem sys = build_system(support, 16);
        VectorXcd v(2);
        v << Complex(1, 0), Complex(-1, 0);
        CertificateReport rep = build_q(sys, v);
        std::vector<TorusPoint> found = extract_support(rep.poly);
        REQUIRE(found.size() == 2);
        CHECK(wrap_distance(found[0], support[0]) < 1e-6);
        CHECK(wrap_distance(found[1], support[1]) < 1e-6);
    }
    SECTION("dual polynomial from a noiseless solve localizes the truth") {
        SpikeTrain x({{TorusPoint(0.15), Complex(1, 0)},
                      {TorusPoint(0.5), Complex(0, 1)},
                      {TorusPoint(0.82), Complex(-1, 0)}});
        DualSolution sol = solve_dual(noiseless(x, 16));
        std::vector<TorusPoint> found = extract_support(dual_polynomial(sol));
        REQUIRE(found.size() == 3);
        std::size_t i = 0;
        for (const Spike& s : x.spikes()) {
            CHECK(wrap_distance(found[i++], s.location) < 1e-4);
        }
    }
}

TEST_CASE("fit_amplitudes") {
    SpikeTrain x({{TorusPoint(0.2), Complex(1, 0.5)}, {TorusPoint(0.6), Complex(-2, 0)}});
    std::vector<TorusPoint> support{TorusPoint(0.2), TorusPoint(0.6)};

    SECTION("exact support, noiseless data") {
        Measurement m = measure(x, 10, NoiseSpec::none());
        SpikeTrain fit = fit_amplitudes(m, support);
        REQUIRE(fit.size() == 2);
        CHECK(std::abs(fit.spikes()[0].amplitude - Complex(1, 0.5)) < 1e-8);
        CHECK(std::abs(fit.spikes()[1].amplitude - Complex(-2, 0)) < 1e-8);
    }
    SECTION("empty support") {
        Measurement m = measure(x, 10, NoiseSpec::none());
        CHECK(fit_amplitudes(m, {}).empty());
    }
    SECTION("a spurious far column gets no mass") {
        Measurement m = measure(x, 10, NoiseSpec::none());
        std::vector<TorusPoint> padded = support;
        padded.emplace_back(0.9);
        SpikeTrain fit = fit_amplitudes(m, padded);
        double spurious = 0.0;
        for (const Spike& s : fit.spikes()) {
            if (wrap_distance(s.location, TorusPoint(0.9)) < 1e-9) {
                spurious = std::abs(s.amplitude);
            }
        }
        CHECK(spurious < 1e-8);
    }
    SECTION("near-coincident support points are rejected") {
        Measurement m = measure(x, 10, NoiseSpec::none());
        std::vector<TorusPoint> bad{TorusPoint(0.2), TorusPoint(0.2 + 1e-14)};
        CHECK_THROWS_AS(fit_amplitudes(m, bad), IllConditioned);
    }
    SECTION("too many support points are rejected") {
        Measurement m = measure(x, 1, NoiseSpec::none());
        std::vector<TorusPoint> many;
        for (int i = 0; i < 4; ++i) many.emplace_back(i / 4.0);
        CHECK_THROWS_AS(fit_amplitudes(m, many), std::invalid_argument);
    }
}

TEST_CASE("recover on a noiseless five-spike instance") {
    SpikeTrain x({{TorusPoint(0.05), Complex(1, 0)},
                  {TorusPoint(0.25), Complex(0, 1)},
                  {TorusPoint(0.45), Complex(-1, 0)},
                  {TorusPoint(0.62), Complex(0.5, 0.5)},
                  {TorusPoint(0.85), Complex(1, 0)}});
    Measurement m = noiseless(x, 30);
    RecoveryResult rec = recover(m);
    REQUIRE(rec.estimate.size() == 5);
    CHECK_FALSE(rec.degenerate_dual);

    std::size_t i = 0;
    for (const Spike& truth : x.spikes()) {
        const Spike& est = rec.estimate.spikes()[i++];
        CHECK(wrap_distance(est.location, truth.location) < 1e-4);
        CHECK(std::abs(est.amplitude - truth.amplitude) / std::abs(truth.amplitude) < 1e-3);
    }
    CHECK(residual_norm(m, rec.estimate) <= m.delta * (1.0 + 1e-6));
    CHECK(tv_norm(rec.estimate) == Approx(rec.dual.objective).epsilon(1e-4));
}

TEST_CASE("recover on zero data returns an empty estimate") {
    Measurement m;
    m.f_lo = 6;
    m.samples = VectorXcd::Zero(13);
    m.delta = 0.5;
    RecoveryResult rec = recover(m);
    CHECK(rec.estimate.empty());
}

TEST_CASE("rotation equivariance") {
    SpikeTrain x({{TorusPoint(0.3), Complex(1, 0)}, {TorusPoint(0.7), Complex(0, 2)}});
    Measurement m = noiseless(x, 8);
    RecoveryResult base = recover(m);

    const Complex phase = std::polar(1.0, 0.83);
    Measurement rotated = m;
    rotated.samples *= phase;
    RecoveryResult rot = recover(rotated);

    REQUIRE(base.estimate.size() == rot.estimate.size());
    for (std::size_t i = 0; i < base.estimate.size(); ++i) {
        const Spike& a = base.estimate.spikes()[i];
        const Spike& b = rot.estimate.spikes()[i];
        CHECK(wrap_distance(a.location, b.location) < 1e-6);
        CHECK(std::abs(b.amplitude - phase * a.amplitude) < 1e-5);
    }
}

TEST_CASE("grid_lasso_oracle basics") {
    SECTION("on-grid spike is found exactly") {
        SpikeTrain x({{TorusPoint(0.5), Complex(0, 1.5)}});
        Measurement m = noiseless(x, 8);
        GridLassoResult res = grid_lasso_oracle(m, 64 * 8);
        CHECK(res.value == Approx(1.5).margin(1e-5));
        // solution concentrates on the single grid atom
        int nonzero = 0;
        for (Eigen::Index g = 0; g < res.solution.size(); ++g) {
            if (std::abs(res.solution[g]) > 1e-6) ++nonzero;
        }
        CHECK(nonzero == 1);
        CHECK(std::abs(res.solution[64 * 8 / 2] - Complex(0, 1.5)) < 1e-4);
    }
    SECTION("zero data within budget") {
        Measurement m;
        m.f_lo = 4;
        m.samples = VectorXcd::Zero(9);
        m.delta = 1.0;
        CHECK(grid_lasso_oracle(m, 64).value == 0.0);
    }
    SECTION("grid too small is rejected") {
        Measurement m;
        m.f_lo = 8;
        m.samples = VectorXcd::Zero(17);
        m.delta = 0.5;
        CHECK_THROWS_AS(grid_lasso_oracle(m, 32), std::invalid_argument);
    }
}
