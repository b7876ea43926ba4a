#include "rissec/errors.hpp"
#include "rissec/quadrature.hpp"
#include "rissec/secrecy.hpp"
#include "rissec/specfun.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rissec;
using doctest::Approx;

namespace {

double db(double x) { return std::pow(10.0, x / 10.0); }

UowcLinkSpec water(Detection d, double avg_db, double r = 1.0) {
    UowcLinkSpec u;
    u.lambda = 0.2;
    u.sigma = 0.35;
    u.p = 1.4;
    u.q = 1.1647;
    u.r = r;
    u.detection = d;
    u.avg_snr = db(avg_db);
    return u;
}

struct Link {
    RisCoefficients R;
    UowcCoefficients U;
    EveCoefficients E;
};

Link baseline(double g1_db = 10.0, double g2_db = 0.0, Detection d = Detection::Heterodyne, double gu_db = 10.0) {
    return {ris_coefficients({2.0, 2.0, 1.0, 1.0, 2, db(g1_db)}), uowc_coefficients(water(d, gu_db)),
            ris_coefficients({2.0, 2.0, 1.0, 1.0, 2, db(g2_db)})};
}

UowcBranch branch(double Psi, double Lambda, double chi) {
    UowcBranch b;
    b.Psi = Psi;
    b.Lambda = Lambda;
    b.chi = chi;
    return b;
}

// Lower incomplete gamma (unregularized) = G^{1,1}_{1,2}(x | 1; chi, 0).
double lower_gamma(double chi, double x) { return boost::math::tgamma_lower(chi, x); }
double upper_gamma(double chi, double x) { return boost::math::tgamma(chi, x); }

// Convergent integral of g^c / (1 + g) G^{1,1}_{1,2}(Psi g^Lambda | 1; chi, 0) for -1 - chi Lambda < c < 0.
double xi_direct(const UowcBranch& b, double c) {
    return integrate_semi_infinite([&](double g) {
               return std::pow(g, c) / (1.0 + g) * lower_gamma(b.chi, b.Psi * std::pow(g, b.Lambda));
           })
        .value;
}

// Continuation to c > -1 by splitting off the constant tail Gamma(chi).
double xi_continued(const UowcBranch& b, double c) {
    const double tail = integrate_semi_infinite([&](double g) {
                            return std::pow(g, c) / (1.0 + g) * upper_gamma(b.chi, b.Psi * std::pow(g, b.Lambda));
                        }).value;
    return boost::math::tgamma(b.chi) * beta_ac(c + 1.0, -c) - tail;
}

}  // namespace

TEST_SUITE("secrecy") {

TEST_CASE("xi1 and xi2 Beta continuations") {
    CHECK(std::abs(xi1(1.0) + std::numbers::pi) < 1e-12);
    CHECK(xi1(0.5) == Approx(boost::math::tgamma(1.25) * boost::math::tgamma(-0.25)).epsilon(1e-12));
    CHECK_THROWS_AS(xi2(1.0, 1.0), PoleError);
    // Inside the convergence strip the continuation is the plain integral.
    const double direct =
        integrate_semi_infinite([](double g) { return std::pow(g, -0.5) / (1.0 + g); }).value;
    CHECK(xi1(-1.0) == Approx(direct).epsilon(1e-9));
    CHECK(xi2(-0.4, -0.6) == Approx(direct).epsilon(1e-9));
}

TEST_CASE("xi3 against the defining integral where it converges") {
    for (const UowcBranch& b : {branch(1.0, 1.0, 1.0), branch(0.7, 1.0, 2.3), branch(1.8, 2.0, 1.4)}) {
        for (double u2 : {-0.5, -1.2}) {
            const double want = xi_direct(b, u2 / 2.0);
            CHECK(xi3(b, u2) == Approx(want).epsilon(1e-8));
        }
    }
}

TEST_CASE("xi3 continuation beyond the strip matches the regularized oracle") {
    for (const UowcBranch& b : {branch(1.0, 1.0, 1.0), branch(0.6, 1.0, 1.4), branch(2.5, 2.0, 1.0)}) {
        for (double u2 : {0.5, 1.3}) {
            const double v = xi3(b, u2);
            CHECK(std::isfinite(v));
            CHECK(v == Approx(xi_continued(b, u2 / 2.0)).epsilon(1e-7));
        }
    }
}

TEST_CASE("xi4 is xi3 at the summed exponent") {
    const UowcBranch b = branch(0.9, 1.0, 1.4);
    CHECK(xi4(b, 0.3, 0.45) == Approx(xi3(b, 0.75)).epsilon(1e-14));
    CHECK_THROWS_AS(xi3(branch(1.0, 0.5, 1.0), 0.5), UnsupportedParameters);
}

TEST_CASE("R-terms") {
    EveCoefficients e;
    e.K2 = 0.5;
    e.K3 = 1.0;
    CHECK(sop_r1(e, 1.0) == Approx(12.0).epsilon(1e-13));
    // upsilon = 0, K2 = 1/2: 2 Gamma(3) K3^{-3}
    e.K3 = 1.7;
    CHECK(sop_r1(e, 0.0) == Approx(4.0 / std::pow(1.7, 3.0)).epsilon(1e-13));

    const EveCoefficients eve = ris_coefficients({2.0, 2.0, 1.0, 1.0, 2, 1.0});
    for (const UowcBranch& b : {branch(1.3, 0.5, 1.0), branch(0.8, 1.0, 1.4), branch(0.5, 1.5, 2.0)}) {
        for (double phi : {1.0, 1.4}) {
            for (double u1 : {0.0, 3.2}) {
                const double c = eve.K2 + u1 / 2.0;
                const double want = integrate_semi_infinite([&](double g) {
                                        return std::pow(g, c) * std::exp(-eve.K3 * std::sqrt(g)) *
                                               lower_gamma(b.chi, b.Psi * std::pow(phi * g, b.Lambda));
                                    }).value;
                CHECK(sop_r_term(eve, b, phi, u1).value() == Approx(want).epsilon(1e-8));
            }
        }
    }
    CHECK_THROWS_AS(sop_r_term(eve, branch(1.0, 0.75, 1.0), 1.0, 0.0), UnsupportedParameters);
}

TEST_CASE("lower-bound SOP: closed form against quadrature") {
    for (double g1 : {0.0, 10.0, 20.0, 30.0}) {
        const Link l = baseline(g1, 0.0, Detection::Heterodyne, 15.0);
        SecrecyQuery q;
        q.epsilon0_bits = 0.01;
        const MetricEstimate quad = sop_lower_quadrature(l.R, l.U, l.E, q);
        const MetricEstimate closed = sop_lower_closed(l.R, l.U, l.E, q);
        CHECK(closed.method == Method::ClosedForm);
        CHECK(closed.terms >= 1);
        if (closed.converged) {
            CHECK(std::abs(closed.value - quad.value) < 1e-6);
        }
        if (g1 >= 20.0) CHECK(closed.converged);
    }
}

TEST_CASE("IM/DD: lower-bound closed form works with half-integer Lambda") {
    const Link l = baseline(20.0, 0.0, Detection::IntensityModulation, 15.0);
    CHECK(l.U.branch[0].Lambda == 0.5);
    SecrecyQuery q;
    q.epsilon0_bits = 0.01;
    const MetricEstimate closed = sop_lower_closed(l.R, l.U, l.E, q);
    REQUIRE(closed.converged);
    CHECK(closed.note.empty());
    CHECK(std::abs(closed.value - sop_lower_quadrature(l.R, l.U, l.E, q).value) < 1e-6);
    // Lambda = 1/2 has no integer-order xi form: routed, and says so.
    const MetricEstimate asc = asc_closed(l.R, l.U, l.E, q);
    CHECK(asc.method == Method::Quadrature);
    CHECK(asc.note.find("routed") != std::string::npos);
}

TEST_CASE("non-integer 2 Lambda routes the lower bound to quadrature") {
    UowcLinkSpec u = water(Detection::IntensityModulation, 15.0, 1.5);
    const RisCoefficients R = ris_coefficients({2.0, 2.0, 1.0, 1.0, 2, db(20.0)});
    const EveCoefficients E = ris_coefficients({2.0, 2.0, 1.0, 1.0, 2, 1.0});
    const MetricEstimate m = sop_lower_closed(R, uowc_coefficients(u), E, SecrecyQuery{});
    CHECK(m.method == Method::Quadrature);
    CHECK(m.note.find("routed") != std::string::npos);
}

TEST_CASE("SPSC closed form is the complement of the lower bound at phi = 1") {
    const Link l = baseline(20.0);
    SecrecyQuery q0;
    const MetricEstimate c = spsc_closed(l.R, l.U, l.E, q0);
    const MetricEstimate s = sop_lower_closed(l.R, l.U, l.E, q0);
    CHECK(c.value == Approx(1.0 - s.value).epsilon(1e-15));
    if (c.converged) CHECK(std::abs(c.value - spsc(l.R, l.U, l.E).value) < 1e-6);
}

TEST_CASE("metric identities and orderings on the quadrature path") {
    const Link l = baseline(10.0);
    const MetricEstimate sp = spsc(l.R, l.U, l.E);
    const MetricEstimate e0 = sop_exact_quadrature(l.R, l.U, l.E, SecrecyQuery{});
    CHECK(std::abs(sp.value + e0.value - 1.0) < 1e-9);
    CHECK(std::abs(sop_lower_quadrature(l.R, l.U, l.E, SecrecyQuery{}).value - e0.value) < 1e-12);

    double prev = 0.0;
    for (double eps : {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0}) {
        SecrecyQuery q;
        q.epsilon0_bits = eps;
        const double lo = sop_lower_quadrature(l.R, l.U, l.E, q).value;
        const double ex = sop_exact_quadrature(l.R, l.U, l.E, q).value;
        CHECK(lo >= 0.0);
        CHECK(lo <= ex);
        CHECK(ex <= 1.0);
        CHECK(ex >= prev);
        prev = ex;
    }
}

TEST_CASE("ASC monotonicity in the average SNRs") {
    double prev = 0.0;
    for (double g1 : {-10.0, 0.0, 10.0, 20.0}) {
        const Link l = baseline(g1);
        const double v = asc_quadrature(l.R, l.U, l.E).value;
        CHECK(v >= prev);
        prev = v;
    }
    prev = 1e300;
    for (double g2 : {-10.0, 0.0, 10.0}) {
        const Link l = baseline(10.0, g2);
        const double v = asc_quadrature(l.R, l.U, l.E).value;
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("ASC limits") {
    const Link dead_main = baseline(-60.0, 0.0, Detection::Heterodyne, -60.0);
    CHECK(asc_quadrature(dead_main.R, dead_main.U, dead_main.E).value < 1e-4);
    // Dead eavesdropper: E[ln(1 + g_eq)].
    const Link dead_eve = baseline(10.0, -80.0);
    const double want = integrate_semi_infinite([&](double g) {
                            return sf_snr_equivalent(dead_eve.R, dead_eve.U, g) / (1.0 + g);
                        }).value;
    CHECK(asc_quadrature(dead_eve.R, dead_eve.U, dead_eve.E).value == Approx(want).epsilon(1e-6));
}

TEST_CASE("frozen quadrature values at the ASC baseline") {
    // Agreed with an independent 1e6-sample Monte-Carlo run when frozen.
    const Link l = baseline();
    CHECK(asc_quadrature(l.R, l.U, l.E).value == Approx(0.933989).epsilon(2e-6));
    CHECK(sop_exact_quadrature(l.R, l.U, l.E, SecrecyQuery{}).value == Approx(0.225676).epsilon(5e-6));
}

TEST_CASE("ASC double series diverges at practical configurations and says so") {
    const Link l = baseline();
    SecrecyQuery q;
    q.max_terms = 40;
    const MetricEstimate a = asc_closed(l.R, l.U, l.E, q);
    CHECK(a.method == Method::ClosedForm);
    CHECK_FALSE(a.converged);
}

TEST_CASE("exact-SOP series is gated and reports its deviation") {
    const Link l = baseline(20.0);
    SecrecyQuery q;
    q.epsilon0_bits = 0.5;
    CHECK_THROWS_AS(sop_exact_series(l.R, l.U, l.E, q, false), UnsupportedParameters);
    const MetricEstimate m = sop_exact_series(l.R, l.U, l.E, q, true);
    CHECK(m.note.find("deviation") != std::string::npos);
    const Link im = baseline(20.0, 0.0, Detection::IntensityModulation);
    CHECK_THROWS_AS(sop_exact_series(im.R, im.U, im.E, q, true), UnsupportedParameters);
}

TEST_CASE("query validation") {
    SecrecyQuery q;
    q.epsilon0_bits = -1.0;
    CHECK_THROWS_AS(q.validate(), DomainError);
    q = {};
    q.max_terms = 0;
    CHECK_THROWS_AS(q.validate(), DomainError);
    q = {};
    q.epsilon0_bits = 1.0;
    CHECK(q.phi() == 2.0);
}

}  // TEST_SUITE
