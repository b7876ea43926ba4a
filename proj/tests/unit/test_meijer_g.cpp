#include "rissec/errors.hpp"
#include "rissec/meijer_g.hpp"
#include "rissec/specfun.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rissec;
using doctest::Approx;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

template <class F>
double worst_on_log_grid(F&& f) {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) worst = std::max(worst, f(std::pow(10.0, -3.0 + 6.0 * i / 49.0)));
    return worst;
}

}  // namespace

TEST_SUITE("meijer_g") {

TEST_CASE("spot values") {
    CHECK(meijer_g({{}, {0.0}, 1, 0}, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK(meijer_g({{0.0}, {0.0}, 1, 1}, 1.0) == Approx(0.5).epsilon(1e-10));
    CHECK(meijer_g({{1.0}, {2.0, 0.0}, 1, 1}, 1.0) == Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("reduction identities on a log grid") {
    CHECK(worst_on_log_grid([](double x) { return rel(meijer_g({{}, {0.0}, 1, 0}, x), std::exp(-x)); }) < 1e-8);
    CHECK(worst_on_log_grid([](double x) { return rel(meijer_g({{0.0}, {0.0}, 1, 1}, x), 1.0 / (1.0 + x)); }) <
          1e-8);
    // Underflows past x ~ 745, so compare logs.
    for (double chi : {0.5, 1.0, 2.3}) {
        CHECK(worst_on_log_grid([chi](double x) {
                  const double want = chi * std::log(x) - x;
                  return std::abs(meijer_g_scaled({{}, {chi}, 1, 0}, x).log_abs() - want) /
                         std::max(1.0, std::abs(want));
              }) < 1e-8);
    }
    for (double p : {0.5, 1.0, 2.0, 3.7}) {
        CHECK(worst_on_log_grid([p](double x) {
                  return rel(meijer_g({{1.0}, {p, 0.0}, 1, 1}, x),
                             boost::math::tgamma(p) * boost::math::gamma_p(p, x));
              }) < 1e-8);
    }
}

TEST_CASE("scaled result keeps relative accuracy far below the double range") {
    const ScaledReal s = meijer_g_scaled({{}, {0.0}, 1, 0}, 1000.0);
    CHECK(s.log_abs() == Approx(-1000.0).epsilon(1e-12));
}

TEST_CASE("no separating contour: residues are added back") {
    // G^{1,1}_{1,1}(x | a; b) = Gamma(1 - a + b) x^b (1 + x)^{a - b - 1}
    const double x = 0.7;
    MeijerGDiagnostics d;
    const ScaledReal v = meijer_g_scaled({{2.5}, {0.0}, 1, 1}, x, &d);
    CHECK(v.value() == Approx(boost::math::tgamma(-1.5) * std::pow(1.0 + x, 1.5)).epsilon(1e-9));
    CHECK(d.residues > 0);
}

TEST_CASE("coincident b parameters (double poles)") {
    // G^{2,0}_{0,2}(x | -; 0, 0) = 2 K_0(2 sqrt x)
    for (double x : {1e-3, 0.05, 1.0, 7.0, 40.0}) {
        CAPTURE(x);
        const double v = meijer_g({{}, {0.0, 0.0}, 2, 0}, x);
        CHECK(v == Approx(2.0 * std::cyl_bessel_k(0.0, 2.0 * std::sqrt(x))).epsilon(1e-9));
    }
}

TEST_CASE("Delta-sequence multiplication identity") {
    // Legendre duplication: G^{2,0}_{0,2}(y | -; Delta(2, 0)) = sqrt(pi) e^{-2 sqrt y}.
    for (double y : {0.01, 0.3, 2.0, 25.0}) {
        const auto b = delta_seq(2, 0.0);
        const double g = meijer_g({{}, b, 2, 0}, y);
        CHECK(g / std::sqrt(std::numbers::pi) == Approx(std::exp(-2.0 * std::sqrt(y))).epsilon(1e-9));
    }
}

TEST_CASE("invalid orders and non-decaying integrands") {
    CHECK_THROWS_AS(meijer_g({{}, {0.0}, 2, 0}, 1.0), DomainError);
    CHECK_THROWS_AS(meijer_g({{1.0}, {0.0}, 1, 2}, 1.0), DomainError);
    CHECK_THROWS_AS(meijer_g({{}, {0.0}, 1, 0}, -1.0), DomainError);
    // m + n = 1 <= (p + q) / 2 = 1: the Mellin-Barnes integrand does not decay.
    CHECK_THROWS_AS(meijer_g({{0.5}, {0.0}, 1, 0}, 0.5), ConvergenceError);
}

}  // TEST_SUITE
