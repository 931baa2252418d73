#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "superres/kernels.hpp"
#include "superres/rng.hpp"
#include "superres/trig_poly.hpp"

using namespace superres;
using Catch::Approx;

TEST_CASE("TrigPoly eval, derivative, modulus_sq") {
    // p(t) = 1 + 2 e^{i2pi t} + (1-i) e^{-i2pi t}
    TrigPoly p(1, {Complex(1, -1), Complex(1, 0), Complex(2, 0)});

    const double t = 0.137;
    const Complex z = std::polar(1.0, kTwoPi * t);
    const Complex expected = Complex(1, -1) / z + Complex(1, 0) + Complex(2, 0) * z;
    CHECK(std::abs(p.eval(t) - expected) < 1e-14);

    // derivative against central differences
    const TrigPoly dp = p.derivative();
    const double h = 1e-6;
    const Complex fd = (p.eval(t + h) - p.eval(t - h)) / (2 * h);
    CHECK(std::abs(dp.eval(t) - fd) < 1e-6);

    // |p|^2 as a polynomial
    const TrigPoly msq = p.modulus_sq();
    CHECK(msq.cutoff() == 2);
    for (double s : {0.0, 0.21, 0.5, 0.83}) {
        const Complex v = msq.eval(s);
        CHECK(std::abs(v.imag()) < 1e-13);
        CHECK(v.real() == Approx(std::norm(p.eval(s))).margin(1e-12));
    }
}

TEST_CASE("dirichlet_eval closed form") {
    CHECK(dirichlet_eval(2, TorusPoint(0.0)) == Approx(5.0));
    CHECK(dirichlet_eval(2, TorusPoint(0.2)) == Approx(0.0).margin(1e-12));
    CHECK(dirichlet_eval(1, TorusPoint(0.5)) == Approx(-1.0));
}

TEST_CASE("fejer_eval closed form and coefficients") {
    // value at 0 equals the coefficient sum
    const int f_hi = 3;
    const TrigPoly p = to_trigpoly({KernelFamily::Kind::Fejer, f_hi});
    Complex coeff_sum(0.0);
    for (const Complex& c : p.coeffs()) coeff_sum += c;
    CHECK(coeff_sum.real() == Approx(4.0));
    CHECK(fejer_eval(f_hi, TorusPoint(0.0)) == Approx(coeff_sum.real()));

    CHECK(fejer_eval(1, TorusPoint(0.5)) == Approx(0.0).margin(1e-12));
    CHECK(p.coeff(0).real() == Approx(1.0));  // unit integral
}

TEST_CASE("fejer nonnegativity at random points") {
    Rng rng(5);
    for (int rep = 0; rep < 10000; ++rep) {
        const int f_hi = 1 + int(rng.below(64));
        CHECK(fejer_eval(f_hi, TorusPoint(rng.uniform())) >= 0.0);
    }
}

TEST_CASE("squared Fejer kernel at the origin") {
    SquaredFejerKernel g(2);
    CHECK(g.eval(0, TorusPoint(0.0)) == Approx(1.0));
    CHECK(g.eval(1, TorusPoint(0.0)) == Approx(0.0).margin(1e-12));  // even kernel
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(g.eval(2, TorusPoint(0.0)) == Approx(-4.0 * pi2));
    CHECK(g.kappa() == Approx(4.0 * pi2));

    for (int f_lo : {4, 16, 64}) {
        SquaredFejerKernel gf(f_lo);
        CHECK(gf.eval(0, TorusPoint(0.0)) == Approx(1.0));
        const double kappa = pi2 * f_lo * (f_lo + 4.0) / 3.0;
        CHECK(gf.eval(2, TorusPoint(0.0)) == Approx(-kappa).epsilon(1e-12));
    }
    CHECK_THROWS_AS(SquaredFejerKernel(5), std::invalid_argument);
    CHECK_THROWS_AS(g_eval(3, 0, TorusPoint(0.1)), std::invalid_argument);
}

TEST_CASE("to_trigpoly coefficient tables") {
    const TrigPoly d1 = to_trigpoly({KernelFamily::Kind::Dirichlet, 1});
    REQUIRE(d1.coeffs().size() == 3);
    for (const Complex& c : d1.coeffs()) CHECK(c == Complex(1.0));

    const TrigPoly f2 = to_trigpoly({KernelFamily::Kind::Fejer, 2});
    const std::vector<double> expected{1.0 / 3, 2.0 / 3, 1.0, 2.0 / 3, 1.0 / 3};
    REQUIRE(f2.coeffs().size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(f2.coeffs()[i].real() == Approx(expected[i]));
    }

    // squared Fejer: autocorrelation of the Fejer(f_lo/2) triangle over m^2
    const int f_lo = 4;
    const TrigPoly g = to_trigpoly({KernelFamily::Kind::SquaredFejer, f_lo});
    CHECK(g.cutoff() == f_lo);
    const int m = f_lo / 2 + 1;
    std::vector<double> tri(static_cast<std::size_t>(2 * m - 1));
    for (int k = -(m - 1); k <= m - 1; ++k) tri[k + m - 1] = double(m - std::abs(k)) / m;
    std::vector<double> conv(static_cast<std::size_t>(2 * f_lo + 1), 0.0);
    for (int a = -(m - 1); a <= m - 1; ++a) {
        for (int b = -(m - 1); b <= m - 1; ++b) {
            conv[a + b + f_lo] += tri[a + m - 1] * tri[b + m - 1] / (m * m);
        }
    }
    for (std::size_t i = 0; i < conv.size(); ++i) {
        CHECK(g.coeffs()[i].real() == Approx(conv[i]).margin(1e-15));
    }

    // zeroth coefficient is the integral of G: cross-check by quadrature of
    // the closed form on a fine grid (the integrand is a trig polynomial, so
    // the periodic trapezoid rule is exact beyond the cutoff)
    SquaredFejerKernel gk(f_lo);
    const int n_quad = 64;
    double integral = 0.0;
    for (int i = 0; i < n_quad; ++i) integral += gk.eval_closed(0, TorusPoint(double(i) / n_quad));
    integral /= n_quad;
    CHECK(g.coeff(0).real() == Approx(integral).margin(1e-12));
}

TEST_CASE("closed form and coefficient sum agree on a dense grid") {
    for (int f : {1, 4, 13}) {
        const TrigPoly pd = to_trigpoly({KernelFamily::Kind::Dirichlet, f});
        const TrigPoly pf = to_trigpoly({KernelFamily::Kind::Fejer, f});
        double worst_d = 0.0, worst_f = 0.0;
        for (int i = 0; i < 1024; ++i) {
            const TorusPoint t(double(i) / 1024);
            worst_d = std::max(worst_d, std::abs(pd.eval(t) - dirichlet_eval(f, t)));
            worst_f = std::max(worst_f, std::abs(pf.eval(t) - fejer_eval(f, t)));
        }
        CHECK(worst_d <= 1e-10 * (2 * f + 1));
        CHECK(worst_f <= 1e-10 * (2 * f + 1));
    }

    for (int f_lo : {2, 8, 32}) {
        SquaredFejerKernel g(f_lo);
        for (int ell = 0; ell <= 3; ++ell) {
            double worst = 0.0, scale = 0.0;
            for (int i = 0; i < 512; ++i) {
                const TorusPoint t(double(i) / 512);
                const double a = g.eval(ell, t);
                const double b = g.eval_closed(ell, t);
                worst = std::max(worst, std::fabs(a - b));
                scale = std::max(scale, std::fabs(a));
            }
            CHECK(worst <= 1e-9 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("G derivatives match finite differences") {
    for (int f_lo : {4, 12}) {
        SquaredFejerKernel g(f_lo);
        Rng rng(23);
        const double h = 1e-5;
        for (int ell = 1; ell <= 3; ++ell) {
            for (int rep = 0; rep < 40; ++rep) {
                const double t = rng.uniform();
                const double fd =
                    (g.eval(ell - 1, TorusPoint(t + h)) - g.eval(ell - 1, TorusPoint(t - h))) /
                    (2 * h);
                const double an = g.eval(ell, TorusPoint(t));
                const double scale = std::max(std::fabs(an), std::pow(f_lo, ell));
                CHECK(std::fabs(an - fd) <= 1e-4 * scale);
            }
        }
    }
}

TEST_CASE("kernel sums near a support point stay below the stated constants") {
    // equispaced support at separation exactly 2 lambda_lo
    const std::vector<double> limits{0.007, 0.08, 1.06};
    for (int f_lo : {32, 64, 128}) {
        SquaredFejerKernel g(f_lo);
        const double lambda = 1.0 / f_lo;
        const int k = f_lo / 2;
        for (int ell = 0; ell <= 2; ++ell) {
            double worst = 0.0;
            for (int i = -40; i <= 40; ++i) {
                const double t = 0.16 * lambda * i / 40.0;
                double sum = 0.0;
                for (int j = 1; j < k; ++j) {
                    sum += std::fabs(g.eval(ell, TorusPoint(t - 2.0 * lambda * j)));
                }
                worst = std::max(worst, sum / std::pow(double(f_lo), ell));
            }
            INFO("f_lo=" << f_lo << " ell=" << ell << " worst=" << worst);
            CHECK(worst <= limits[static_cast<std::size_t>(ell)]);
        }
    }
}
