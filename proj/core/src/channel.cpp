// SPDX-License-Identifier: Apache-2.0
#include "rissec/channel.hpp"

#include "rissec/errors.hpp"
#include "rissec/meijer_g.hpp"
#include "rissec/specfun.hpp"

#include <cmath>
#include <string>

namespace rissec {
namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

double lg(double x) { return ln_gamma(x); }

}  // namespace

void RisLinkSpec::validate() const {
    require(m_hop1 >= 0.5 && m_hop2 >= 0.5, "RisLinkSpec: Nakagami m must be >= 0.5");
    require(omega_hop1 > 0.0 && omega_hop2 > 0.0, "RisLinkSpec: omega must be positive");
    require(elements >= 1, "RisLinkSpec: at least one reflecting element");
    require(avg_snr > 0.0 && std::isfinite(avg_snr), "RisLinkSpec: average SNR must be positive");
}

double nakagami_mean(double m, double omega) {
    return std::exp(lg(m + 0.5) - lg(m)) * std::sqrt(omega / m);
}

RisCoefficients ris_coefficients(const RisLinkSpec& spec) {
    spec.validate();
    const double m1 = spec.m_hop1, m2 = spec.m_hop2;
    const double S = spec.elements;
    // Work in ratios r = Gamma(m + 1/2)^2 / (m Gamma(m)^2) = E[alpha]^2 / E[alpha^2]
    // so that large m does not overflow.
    const double r1 = std::exp(2.0 * (lg(m1 + 0.5) - lg(m1))) / m1;
    const double r2 = std::exp(2.0 * (lg(m2 + 0.5) - lg(m2))) / m2;
    const double denom = 1.0 - r1 * r2;  // Var(alpha beta) / E[(alpha beta)^2]
    if (!(denom > 0.0)) throw DomainError("ris_coefficients: degenerate moment-matching denominator");

    RisCoefficients c;
    const double mean = nakagami_mean(m1, spec.omega_hop1) * nakagami_mean(m2, spec.omega_hop2);
    const double shape = S * r1 * r2 / denom;  // a + 1
    c.a = shape - 1.0;
    c.b = mean * denom / (r1 * r2);
    if (!(shape > 0.0) || !(c.b > 0.0)) throw DomainError("ris_coefficients: invalid Gamma fit");
    c.avg_snr = spec.avg_snr;
    c.K2 = (c.a - 1.0) / 2.0;
    c.K3 = 1.0 / (c.b * std::sqrt(spec.avg_snr));
    c.K1 = std::exp(-0.5 * shape * std::log(spec.avg_snr) - std::log(2.0) - shape * std::log(c.b) -
                    lg(shape));
    return c;
}

double RisCoefficients::K4(unsigned n) const {
    const double v = upsilon(n);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(v * std::log(K3) - lg(n + 1.0) - std::log(v) - lg(a + 1.0));
}

double pdf_snr_ris(const RisCoefficients& c, double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("pdf_snr_ris: gamma must be non-negative");
    if (gamma == 0.0) {
        if (c.K2 > 0.0) return 0.0;
        if (c.K2 == 0.0) return c.K1;
        throw DomainError("pdf_snr_ris: density is unbounded at 0 for a < 1");
    }
    if (std::isinf(gamma)) return 0.0;
    return std::exp(std::log(c.K1) + c.K2 * std::log(gamma) - c.K3 * std::sqrt(gamma));
}

double cdf_snr_ris(const RisCoefficients& c, double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("cdf_snr_ris: gamma must be non-negative");
    return regularized_lower_gamma(c.a + 1.0, c.K3 * std::sqrt(gamma));
}

double sf_snr_ris(const RisCoefficients& c, double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("sf_snr_ris: gamma must be non-negative");
    return regularized_upper_gamma(c.a + 1.0, c.K3 * std::sqrt(gamma));
}

SeriesValue cdf_snr_ris_series(const RisCoefficients& c, double gamma, unsigned max_terms) {
    if (!(gamma >= 0.0)) throw DomainError("cdf_snr_ris_series: gamma must be non-negative");
    if (max_terms < 1) throw DomainError("cdf_snr_ris_series: need at least one term");
    SeriesValue out;
    if (gamma == 0.0) {
        out.terms = 1;
        out.converged = true;
        return out;
    }
    const double lx = std::log(gamma);
    CompensatedSum acc;
    for (unsigned n = 0; n < max_terms; ++n) {
        const double term = c.K4(n) * std::exp(0.5 * c.upsilon(n) * lx);
        acc.add(term);
        out.terms = n + 1;
        out.last_term = term;
        if (std::abs(term) < 1e-12 * std::abs(acc.value())) {
            out.converged = true;
            break;
        }
    }
    out.value = acc.value();
    out.error_estimate = acc.max_abs_term() * 1e-15 + std::abs(out.last_term);
    if (out.error_estimate >= 1e-7) out.converged = false;
    return out;
}

void UowcLinkSpec::validate() const {
    require(lambda > 0.0 && lambda < 1.0, "UowcLinkSpec: lambda must lie in (0, 1)");
    require(sigma > 0.0 && p > 0.0 && q > 0.0 && r > 0.0, "UowcLinkSpec: sigma, p, q, r must be positive");
    require(detection == Detection::Heterodyne || detection == Detection::IntensityModulation,
            "UowcLinkSpec: detection must be HD (1) or IM/DD (2)");
    require(avg_snr > 0.0 && std::isfinite(avg_snr), "UowcLinkSpec: average SNR must be positive");
    require(!im_scale || *im_scale > 0.0, "UowcLinkSpec: IM/DD scale must be positive");
}

UowcCoefficients uowc_coefficients(const UowcLinkSpec& spec) {
    spec.validate();
    const double s = spec.s();
    const double lam = spec.lambda;
    UowcCoefficients c;
    c.lambda = lam;
    c.p = spec.p;
    if (spec.detection == Detection::Heterodyne) {
        c.eta = spec.avg_snr;
    } else {
        const double bs = spec.im_scale.value_or(spec.q);
        const double second = 2.0 * lam * spec.sigma * spec.sigma +
                              bs * bs * (1.0 - lam) * std::exp(lg(spec.p + 2.0 / spec.r) - lg(spec.p));
        c.eta = spec.avg_snr / second;
    }
    UowcBranch& b1 = c.branch[0];
    b1.Psi = 1.0 / (spec.sigma * std::pow(c.eta, 1.0 / s));
    b1.Lambda = 1.0 / s;
    b1.chi = 1.0;
    b1.Upsilon = lam / s;
    b1.zeta = lam;
    UowcBranch& b2 = c.branch[1];
    b2.Psi = 1.0 / (std::pow(spec.q, spec.r) * std::pow(c.eta, spec.r / s));
    b2.Lambda = spec.r / s;
    b2.chi = spec.p;
    b2.Upsilon = spec.r * (1.0 - lam) / (s * std::exp(lg(spec.p)));
    b2.zeta = (1.0 - lam) / std::exp(lg(spec.p));
    return c;
}

double pdf_snr_uowc(const UowcCoefficients& c, double gamma) {
    if (!(gamma > 0.0)) throw DomainError("pdf_snr_uowc: gamma must be positive");
    if (std::isinf(gamma)) return 0.0;
    const double lx = std::log(gamma);
    double acc = 0.0;
    for (const UowcBranch& br : c.branch) {
        const double lz = std::log(br.Psi) + br.Lambda * lx;
        const double z = std::exp(lz);
        acc += br.Upsilon * std::exp(-lx + br.chi * lz - z);
    }
    return acc;
}

double pdf_snr_uowc_meijer(const UowcCoefficients& c, double gamma) {
    if (!(gamma > 0.0)) throw DomainError("pdf_snr_uowc: gamma must be positive");
    double acc = 0.0;
    for (const UowcBranch& br : c.branch) {
        const MeijerGSpec g{{}, {br.chi}, 1, 0};
        const double z = br.Psi * std::pow(gamma, br.Lambda);
        acc += br.Upsilon / gamma * meijer_g(g, z);
    }
    return acc;
}

double cdf_snr_uowc(const UowcCoefficients& c, double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("cdf_snr_uowc: gamma must be non-negative");
    if (gamma == 0.0) return 0.0;
    const UowcBranch& b1 = c.branch[0];
    const UowcBranch& b2 = c.branch[1];
    const double z1 = b1.Psi * std::pow(gamma, b1.Lambda);
    const double z2 = b2.Psi * std::pow(gamma, b2.Lambda);
    return c.lambda * -std::expm1(-z1) + (1.0 - c.lambda) * regularized_lower_gamma(c.p, z2);
}

double cdf_snr_uowc_meijer(const UowcCoefficients& c, double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("cdf_snr_uowc: gamma must be non-negative");
    if (gamma == 0.0) return 0.0;
    double acc = 0.0;
    for (const UowcBranch& br : c.branch) {
        const MeijerGSpec g{{1.0}, {br.chi, 0.0}, 1, 1};
        acc += br.zeta * meijer_g(g, br.Psi * std::pow(gamma, br.Lambda));
    }
    return acc;
}

double sf_snr_uowc(const UowcCoefficients& c, double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("sf_snr_uowc: gamma must be non-negative");
    if (gamma == 0.0) return 1.0;
    const UowcBranch& b1 = c.branch[0];
    const UowcBranch& b2 = c.branch[1];
    const double z1 = b1.Psi * std::pow(gamma, b1.Lambda);
    const double z2 = b2.Psi * std::pow(gamma, b2.Lambda);
    return c.lambda * std::exp(-z1) + (1.0 - c.lambda) * regularized_upper_gamma(c.p, z2);
}

double cdf_snr_equivalent(const RisCoefficients& ris, const UowcCoefficients& uowc, double gamma) {
    return 1.0 - sf_snr_equivalent(ris, uowc, gamma);
}

double sf_snr_equivalent(const RisCoefficients& ris, const UowcCoefficients& uowc, double gamma) {
    return sf_snr_ris(ris, gamma) * sf_snr_uowc(uowc, gamma);
}

}  // namespace rissec
