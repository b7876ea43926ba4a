// SPDX-License-Identifier: Apache-2.0
#include "rissec/secrecy.hpp"

#include "rissec/errors.hpp"
#include "rissec/meijer_g.hpp"
#include "rissec/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace rissec {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kSeriesRel = 1e-12;
// Relative accuracy assumed for a single Meijer-G term when bounding the
// cancellation error of a series.
constexpr double kTermRel = 1e-10;
constexpr double kSeriesErrorCap = 1e-4;

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-9 && x > 0.5; }

void flag_probability(MetricEstimate& m) {
    m.out_of_range = !(m.value >= -1e-12 && m.value <= 1.0 + 1e-12);
}

// Running series with the stopping rule shared by every closed form.
struct Series {
    CompensatedSum acc;
    double sum_abs = 0.0;
    double last = 0.0;
    unsigned terms = 0;
    bool stopped = false;
    bool finite = true;
    bool hopeless = false;

    // Returns true when the series should stop.
    bool add(double term) {
        if (!std::isfinite(term)) {
            finite = false;
            return true;
        }
        acc.add(term);
        sum_abs += std::abs(term);
        last = term;
        ++terms;
        // sum_abs only grows, so once cancellation has eaten the error budget
        // no later term can rescue the result.
        if (sum_abs * kTermRel >= kSeriesErrorCap) {
            hopeless = true;
            return true;
        }
        const double partial = std::abs(acc.value());
        if (std::abs(term) < kSeriesRel * partial || (term == 0.0 && partial == 0.0 && terms > 1)) {
            stopped = true;
        }
        return stopped;
    }
    double error() const { return sum_abs * kTermRel + std::abs(last); }
    bool converged() const { return finite && !hopeless && stopped && error() < kSeriesErrorCap; }
};

double mean_snr(const RisCoefficients& c) { return (c.a + 1.0) * (c.a + 2.0) * c.b * c.b * c.avg_snr; }

// SNR values where the relay and optical CDFs move.
std::vector<double> transition_scales(const RisCoefficients& ris, const UowcCoefficients& uowc) {
    std::vector<double> s{mean_snr(ris)};
    for (const UowcBranch& br : uowc.branch) s.push_back(std::pow(br.Psi, -1.0 / br.Lambda));
    return s;
}

double eq_cdf(const RisCoefficients& ris, const UowcCoefficients& uowc, double g) {
    const double fr = cdf_snr_ris(ris, g);
    const double fu = cdf_snr_uowc(uowc, g);
    return fr + fu - fr * fu;
}

// E[h(g_E)] for h bounded. With z = K3 sqrt(g_E) ~ Gamma(a + 1, 1) the
// integrand is smooth; [0, 1] is mapped through w = z^{a+1} to remove the
// endpoint power.
QuadratureResult expect_eve(const EveCoefficients& eve, const Integrand& h, const std::vector<double>& z_marks,
                            const QuadraturePolicy& policy) {
    const double shape = eve.a + 1.0;
    const double lg_shape = ln_gamma(shape);
    const double lg_shape1 = ln_gamma(shape + 1.0);
    auto g_of = [&](double z) {
        const double t = z / eve.K3;
        return t * t;
    };
    const Integrand low = [&](double w) {
        const double z = std::pow(w, 1.0 / shape);
        return h(g_of(z)) * std::exp(-z - lg_shape1);
    };
    const Integrand high = [&](double u) {
        const double z = 1.0 + u;
        return h(g_of(z)) * std::exp(eve.a * std::log(z) - z - lg_shape);
    };
    std::vector<double> bp;
    const double zmax = shape + 60.0 + 12.0 * std::sqrt(shape);
    for (double z = 2.0; z < zmax; z *= 2.0) bp.push_back(z - 1.0);
    bp.push_back(zmax - 1.0);
    for (double z : z_marks) {
        if (z > 1.05 && z < zmax) bp.push_back(z - 1.0);
    }
    std::sort(bp.begin(), bp.end());
    std::vector<double> nodes;
    for (double v : bp) {
        if (nodes.empty() || v > nodes.back() * (1.0 + 1e-6)) nodes.push_back(v);
    }
    QuadraturePolicy half = policy;
    half.abs_tol = 0.5 * policy.abs_tol;
    const QuadratureResult a = integrate(low, 0.0, 1.0, half);
    const QuadratureResult b = integrate_partitioned(high, nodes, half);
    return {a.value + b.value, a.error + b.error, a.evaluations + b.evaluations, a.subdivisions + b.subdivisions};
}

// SOP-type expectation E[F_eq(phi g_E + offset)].
MetricEstimate sop_expectation(const RisCoefficients& ris, const UowcCoefficients& uowc,
                               const EveCoefficients& eve, double phi, double offset,
                               const QuadraturePolicy& policy) {
    std::vector<double> marks;
    for (double s : transition_scales(ris, uowc)) {
        for (double f : {0.1, 1.0, 10.0}) {
            const double g = (f * s - offset) / phi;
            if (g > 0.0) marks.push_back(eve.K3 * std::sqrt(g));
        }
    }
    const Integrand h = [&](double g) { return eq_cdf(ris, uowc, phi * g + offset); };
    MetricEstimate out;
    out.method = Method::Quadrature;
    try {
        const QuadratureResult r = expect_eve(eve, h, marks, policy);
        out.value = r.value;
        out.error_estimate = r.error;
    } catch (const QuadratureError& e) {
        out.value = e.estimate();
        out.error_estimate = e.error();
        out.converged = false;
        out.note = "quadrature tolerance not met";
    }
    flag_probability(out);
    return out;
}

LogTerm log_term(double log_abs, int sign) { return {log_abs, sign}; }

MeijerGSpec xi_spec(const UowcBranch& br, double c) {
    const int L = static_cast<int>(std::lround(br.Lambda));
    const std::vector<double> J = delta_seq(L, -c);
    MeijerGSpec g;
    g.a.push_back(1.0);
    g.a.insert(g.a.end(), J.begin(), J.end());
    g.b.push_back(br.chi);
    g.b.insert(g.b.end(), J.begin(), J.end());
    g.b.push_back(0.0);
    g.m = 1 + J.size();
    g.n = 1 + J.size();
    return g;
}

LogTerm xi_log(const UowcBranch& br, double c) {
    if (!is_integer(br.Lambda)) {
        throw UnsupportedParameters("xi3/xi4: Lambda must be a positive integer");
    }
    const ScaledReal g = meijer_g_scaled(xi_spec(br, c), br.Psi);
    const double pre = (1.0 - br.Lambda) * kLog2Pi;
    return {g.log_abs() + pre, g.mantissa < 0.0 ? -1 : 1};
}

// Beta continuation with the symmetric perturbation used for integer half-sums.
double xi_beta_regularized(double c) {
    if (std::abs(c - std::round(c)) > 1e-6) return beta_ac(c + 1.0, -c);
    constexpr double d = 0.5e-7;  // upsilon shifted by 1e-7
    return 0.5 * (beta_ac(c + d + 1.0, -c - d) + beta_ac(c - d + 1.0, -c + d));
}

LogTerm xi_log_regularized(const UowcBranch& br, double c) {
    try {
        return xi_log(br, c);
    } catch (const PoleError&) {
        constexpr double d = 0.5e-7;
        const double v = 0.5 * (xi_log(br, c + d).value() + xi_log(br, c - d).value());
        return {std::log(std::abs(v)), v < 0.0 ? -1 : 1};
    }
}

double log_abs_k4(const RisCoefficients& c, unsigned n) {
    const double v = c.upsilon(n);
    return v * std::log(c.K3) - ln_gamma(n + 1.0) - std::log(v) - ln_gamma(c.a + 1.0);
}
int sign_k4(unsigned n) { return n % 2 == 0 ? 1 : -1; }

}  // namespace

double LogTerm::value() const { return sign * std::exp(log_abs); }

std::string to_string(Method m) {
    switch (m) {
        case Method::ClosedForm: return "closed";
        case Method::Quadrature: return "quadrature";
        case Method::MonteCarlo: return "mc";
    }
    return "unknown";
}

double SecrecyQuery::phi() const { return std::exp2(epsilon0_bits); }

void SecrecyQuery::validate() const {
    if (!(epsilon0_bits >= 0.0) || !std::isfinite(epsilon0_bits)) {
        throw DomainError("SecrecyQuery: target rate must be non-negative");
    }
    if (max_terms < 1) throw DomainError("SecrecyQuery: max_terms must be >= 1");
}

QuadraturePolicy metric_policy() {
    QuadraturePolicy p;
    p.abs_tol = 1e-13;
    p.rel_tol = 1e-10;
    p.max_subdivisions = 6000;
    return p;
}

// ---------------------------------------------------------------------------

MetricEstimate asc_quadrature(const RisCoefficients& ris, const UowcCoefficients& uowc,
                              const EveCoefficients& eve, const QuadraturePolicy& policy) {
    std::vector<double> scales = transition_scales(ris, uowc);
    scales.push_back(mean_snr(eve));
    scales.push_back(1.0);
    const double lo = *std::min_element(scales.begin(), scales.end()) * 1e-14;
    const double hi = *std::max_element(scales.begin(), scales.end()) * 1e3;
    std::vector<double> bp;
    for (double x = lo; x < hi; x *= 10.0) bp.push_back(x);
    bp.push_back(hi);

    const Integrand f = [&](double g) {
        const double fe = cdf_snr_ris(eve, g);
        if (fe == 0.0) return 0.0;
        return fe * sf_snr_equivalent(ris, uowc, g) / (1.0 + g);
    };
    MetricEstimate out;
    out.method = Method::Quadrature;
    try {
        const QuadratureResult r = integrate_partitioned(f, bp, policy);
        out.value = r.value;
        out.error_estimate = r.error;
    } catch (const QuadratureError& e) {
        out.value = e.estimate();
        out.error_estimate = e.error();
        out.converged = false;
        out.note = "quadrature tolerance not met";
    }
    return out;
}

double xi1(double upsilon2) { return beta_ac(upsilon2 / 2.0 + 1.0, -upsilon2 / 2.0); }

double xi2(double upsilon1, double upsilon2) {
    const double c = (upsilon1 + upsilon2) / 2.0;
    return beta_ac(c + 1.0, -c);
}

double xi3(const UowcBranch& branch, double upsilon2) { return xi_log(branch, upsilon2 / 2.0).value(); }

double xi4(const UowcBranch& branch, double upsilon1, double upsilon2) {
    return xi_log(branch, (upsilon1 + upsilon2) / 2.0).value();
}

MetricEstimate asc_closed(const RisCoefficients& ris, const UowcCoefficients& uowc, const EveCoefficients& eve,
                          const SecrecyQuery& query) {
    query.validate();
    for (const UowcBranch& br : uowc.branch) {
        if (!is_integer(br.Lambda)) {
            MetricEstimate q = asc_quadrature(ris, uowc, eve);
            q.note = "closed form needs integer Lambda; routed to quadrature";
            return q;
        }
    }
    const unsigned N = query.max_terms;
    Series outer;
    bool inner_ok = true;
    for (unsigned n2 = 0; n2 < N; ++n2) {
        const double u2 = eve.upsilon(n2);
        const double lk2 = log_abs_k4(eve, n2);
        const int sk2 = sign_k4(n2);
        CompensatedSum row;
        row.add(sk2 * std::exp(lk2) * xi_beta_regularized(u2 / 2.0));

        // n1 sums: the Beta part and both optical branches share the index.
        Series inner;
        for (unsigned n1 = 0; n1 < N; ++n1) {
            const double u1 = ris.upsilon(n1);
            const double c = (u1 + u2) / 2.0;
            const double lk = log_abs_k4(ris, n1) + lk2;
            const int sk = sign_k4(n1) * sk2;
            double t = -sk * std::exp(lk) * xi_beta_regularized(c);
            for (const UowcBranch& br : uowc.branch) {
                const LogTerm x4 = xi_log_regularized(br, c);
                t += br.zeta * sk * x4.sign * std::exp(lk + x4.log_abs);
            }
            if (inner.add(t)) break;
        }
        inner_ok = inner_ok && inner.converged();
        if (!inner.converged()) {
            outer.finite = outer.finite && inner.finite;
            outer.hopeless = true;
            outer.add(row.value() + inner.acc.value());
            break;
        }
        row.add(inner.acc.value());
        for (const UowcBranch& br : uowc.branch) {
            const LogTerm x3 = xi_log_regularized(br, u2 / 2.0);
            row.add(-br.zeta * sk2 * x3.sign * std::exp(lk2 + x3.log_abs));
        }
        if (outer.add(row.value())) break;
    }
    MetricEstimate out;
    out.method = Method::ClosedForm;
    out.value = outer.acc.value();
    out.terms = outer.terms;
    out.last_term = outer.last;
    out.error_estimate = outer.error();
    out.converged = outer.converged() && inner_ok;
    out.note = "analytically continued xi terms";
    return out;
}

// ---------------------------------------------------------------------------

MetricEstimate sop_exact_quadrature(const RisCoefficients& ris, const UowcCoefficients& uowc,
                                    const EveCoefficients& eve, const SecrecyQuery& query,
                                    const QuadraturePolicy& policy) {
    query.validate();
    const double phi = query.phi();
    return sop_expectation(ris, uowc, eve, phi, phi - 1.0, policy);
}

MetricEstimate sop_lower_quadrature(const RisCoefficients& ris, const UowcCoefficients& uowc,
                                    const EveCoefficients& eve, const SecrecyQuery& query,
                                    const QuadraturePolicy& policy) {
    query.validate();
    return sop_expectation(ris, uowc, eve, query.phi(), 0.0, policy);
}

double sop_r1(const EveCoefficients& eve, double upsilon1) {
    const double e = upsilon1 + 2.0 * eve.K2 + 2.0;
    return 2.0 * std::exp(ln_gamma(e) - e * std::log(eve.K3));
}

LogTerm sop_r_term(const EveCoefficients& eve, const UowcBranch& br, double phi, double upsilon1) {
    const double k_real = 2.0 * br.Lambda;
    if (!is_integer(k_real)) throw UnsupportedParameters("sop_r_term: 2 Lambda must be a positive integer");
    const int k = static_cast<int>(std::lround(k_real));
    const double c = eve.K2 + upsilon1 / 2.0;
    const double alpha = 2.0 * c + 2.0;
    MeijerGSpec g;
    g.a = delta_seq(k, 1.0 - alpha);
    g.a.push_back(1.0);
    g.b = {br.chi, 0.0};
    g.m = 1;
    g.n = g.a.size();
    const double log_x = std::log(br.Psi) + br.Lambda * std::log(phi) + k * (std::log(k) - std::log(eve.K3));
    const ScaledReal gv = meijer_g_scaled(g, std::exp(log_x));
    const double pre = std::log(2.0) + (alpha - 0.5) * std::log(k) + 0.5 * (1 - k) * kLog2Pi -
                       alpha * std::log(eve.K3);
    return log_term(gv.log_abs() + pre, gv.mantissa < 0.0 ? -1 : 1);
}

MetricEstimate sop_lower_closed(const RisCoefficients& ris, const UowcCoefficients& uowc,
                                const EveCoefficients& eve, const SecrecyQuery& query) {
    query.validate();
    for (const UowcBranch& br : uowc.branch) {
        if (!is_integer(2.0 * br.Lambda)) {
            MetricEstimate q = sop_lower_quadrature(ris, uowc, eve, query);
            q.note = "closed form needs integer 2 Lambda; routed to quadrature";
            return q;
        }
    }
    const double phi = query.phi();
    const double log_ke1 = std::log(eve.K1);
    CompensatedSum fixed;
    for (const UowcBranch& br : uowc.branch) {
        const LogTerm r2 = sop_r_term(eve, br, phi, 0.0);
        fixed.add(br.zeta * r2.sign * std::exp(log_ke1 + r2.log_abs));
    }
    Series s;
    for (unsigned n = 0; n < query.max_terms; ++n) {
        const double u1 = ris.upsilon(n);
        const double log_kr5 = log_abs_k4(ris, n) + log_ke1 + 0.5 * u1 * std::log(phi);
        const int sg = sign_k4(n);
        double t = sg * std::exp(log_kr5 + std::log(sop_r1(eve, u1)));
        for (const UowcBranch& br : uowc.branch) {
            const LogTerm r3 = sop_r_term(eve, br, phi, u1);
            t -= br.zeta * sg * r3.sign * std::exp(log_kr5 + r3.log_abs);
        }
        if (s.add(t)) break;
    }
    MetricEstimate out;
    out.method = Method::ClosedForm;
    out.value = fixed.value() + s.acc.value();
    out.terms = s.terms;
    out.last_term = s.last;
    out.error_estimate = s.error();
    out.converged = s.converged();
    flag_probability(out);
    return out;
}

MetricEstimate sop_exact_series(const RisCoefficients& ris, const UowcCoefficients& uowc,
                                const EveCoefficients& eve, const SecrecyQuery& query, bool experimental) {
    query.validate();
    if (!experimental) {
        throw UnsupportedParameters(
            "sop_exact_series: the outer coefficient is a reconstruction; enable the experimental flag");
    }
    for (const UowcBranch& br : uowc.branch) {
        if (!is_integer(br.Lambda)) throw UnsupportedParameters("sop_exact_series: Lambda must be an integer");
    }
    const double phi = query.phi();
    const double phi2 = 2.0 * phi - 1.0;  // binomial sum of the shifted argument
    const double ke1 = eve.K1;
    const unsigned Q = query.max_terms;

    // X1 and X3 depend on p1 only.
    std::vector<double> x13;
    auto x13_at = [&](unsigned p1) {
        while (x13.size() <= p1) {
            const unsigned p = static_cast<unsigned>(x13.size());
            double v = sop_r1(eve, 2.0 * p);
            for (const UowcBranch& br : uowc.branch) v -= br.zeta * sop_r_term(eve, br, phi2, 2.0 * p).value();
            x13.push_back(v);
        }
        return x13[p1];
    };

    CompensatedSum fixed;
    for (const UowcBranch& br : uowc.branch) fixed.add(br.zeta * ke1 * sop_r_term(eve, br, phi2, 0.0).value());

    Series outer;
    bool inner_ok = true;
    for (unsigned n1 = 0; n1 < query.max_terms; ++n1) {
        const double h = ris.upsilon(n1) / 2.0;
        const double kr4 = ris.K4(n1);
        Series inner;
        for (unsigned q1 = 0; q1 < Q; ++q1) {
            const double cq = gen_binomial(h, q1);
            double t = 0.0;
            for (unsigned p1 = 0; p1 <= q1; ++p1) {
                const double kr6 = kr4 * ke1 * cq * gen_binomial(q1, p1) * std::pow(phi - 1.0, h - p1) *
                                   std::pow(phi, static_cast<double>(p1));
                if (kr6 != 0.0) t += kr6 * x13_at(p1);
            }
            if (inner.add(t)) break;
        }
        inner_ok = inner_ok && inner.converged();
        if (!inner.converged()) {
            outer.add(inner.acc.value());
            break;
        }
        if (outer.add(inner.acc.value())) break;
    }
    MetricEstimate out;
    out.method = Method::ClosedForm;
    out.value = fixed.value() + outer.acc.value();
    out.terms = outer.terms;
    out.last_term = outer.last;
    out.error_estimate = outer.error();
    out.converged = outer.converged() && inner_ok;
    const MetricEstimate ref = sop_exact_quadrature(ris, uowc, eve, query);
    std::ostringstream note;
    note << "experimental reconstruction; deviation from quadrature " << (out.value - ref.value);
    out.note = note.str();
    flag_probability(out);
    return out;
}

MetricEstimate spsc(const RisCoefficients& ris, const UowcCoefficients& uowc, const EveCoefficients& eve,
                    const QuadraturePolicy& policy) {
    MetricEstimate m = sop_exact_quadrature(ris, uowc, eve, SecrecyQuery{}, policy);
    m.value = 1.0 - m.value;
    flag_probability(m);
    return m;
}

MetricEstimate spsc_closed(const RisCoefficients& ris, const UowcCoefficients& uowc,
                           const EveCoefficients& eve, const SecrecyQuery& query) {
    SecrecyQuery q = query;
    q.epsilon0_bits = 0.0;
    MetricEstimate m = sop_lower_closed(ris, uowc, eve, q);
    m.value = 1.0 - m.value;
    flag_probability(m);
    return m;
}

}  // namespace rissec
