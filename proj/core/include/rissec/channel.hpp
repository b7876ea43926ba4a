// SPDX-License-Identifier: Apache-2.0
//
// SNR statistics of the three links: the RIS-assisted RF hops to the relay
// and to the eavesdropper (Nakagami-m cascades, moment-matched to a Gamma
// amplitude), and the underwater optical hop (mixture exponential
// generalized-Gamma irradiance).
//
// All SNR quantities are linear. Omega is the mean power E[alpha^2].
#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace rissec {

struct RisLinkSpec {
    double m_hop1 = 1.0;
    double m_hop2 = 1.0;
    double omega_hop1 = 1.0;
    double omega_hop2 = 1.0;
    unsigned elements = 1;  // S
    double avg_snr = 1.0;   // gamma_m, linear

    /// Throws DomainError unless m >= 0.5, omega > 0, S >= 1, avg_snr > 0.
    void validate() const;
};

/// Sum_{i<=S} alpha_i beta_i ~ Gamma(shape a + 1, scale b), so that
/// f(g) = K1 g^K2 exp(-K3 sqrt(g)).
struct RisCoefficients {
    double a = 0.0;
    double b = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
    double K3 = 0.0;
    double avg_snr = 0.0;

    /// a + n + 1
    double upsilon(unsigned n) const noexcept { return a + n + 1.0; }
    /// Coefficient of g^{upsilon(n)/2} in the series CDF.
    double K4(unsigned n) const;
};

/// The eavesdropper hop has the same law; the alias only documents intent.
using EveCoefficients = RisCoefficients;

RisCoefficients ris_coefficients(const RisLinkSpec& spec);

/// E[alpha] for a Nakagami-m amplitude with mean power omega.
double nakagami_mean(double m, double omega);

double pdf_snr_ris(const RisCoefficients& c, double gamma);
double cdf_snr_ris(const RisCoefficients& c, double gamma);
/// 1 - cdf, accurate in the upper tail.
double sf_snr_ris(const RisCoefficients& c, double gamma);

struct SeriesValue {
    double value = 0.0;
    unsigned terms = 0;
    double last_term = 0.0;
    /// Largest term times 1e-15 (cancellation) plus the last retained term.
    double error_estimate = 0.0;
    bool converged = false;
};

/// Alternating power series of the incomplete gamma CDF, truncated at
/// `max_terms`. Converged when |last term| < 1e-12 |partial| and the
/// error estimate stays below 1e-7.
SeriesValue cdf_snr_ris_series(const RisCoefficients& c, double gamma, unsigned max_terms);

enum class Detection { Heterodyne = 1, IntensityModulation = 2 };

enum class Salinity { Fresh, Salty };

/// Descriptive only; the numbers come from the parameter file.
struct WaterCondition {
    std::string label;
    double bubble_lpm = 0.0;          // h
    double gradient_degC_per_cm = 0.0;  // l
    Salinity salinity = Salinity::Fresh;
};

struct UowcLinkSpec {
    double lambda = 0.5;
    double sigma = 1.0;
    double p = 1.0;
    double q = 1.0;
    double r = 1.0;
    Detection detection = Detection::Heterodyne;
    double avg_snr = 1.0;  // gamma_mu, linear
    /// Scale entering the IM/DD electrical SNR; q when unset.
    std::optional<double> im_scale;
    WaterCondition water;

    void validate() const;
    double s() const noexcept { return static_cast<double>(detection); }
};

struct UowcBranch {
    double Psi = 0.0;
    double Lambda = 0.0;
    double chi = 0.0;
    double Upsilon = 0.0;
    double zeta = 0.0;
};

struct UowcCoefficients {
    double eta = 0.0;
    double lambda = 0.0;
    double p = 0.0;
    UowcBranch branch[2];
};

UowcCoefficients uowc_coefficients(const UowcLinkSpec& spec);

double pdf_snr_uowc(const UowcCoefficients& c, double gamma);
double pdf_snr_uowc_meijer(const UowcCoefficients& c, double gamma);
double cdf_snr_uowc(const UowcCoefficients& c, double gamma);
double cdf_snr_uowc_meijer(const UowcCoefficients& c, double gamma);
double sf_snr_uowc(const UowcCoefficients& c, double gamma);

/// 1 - (1 - F_R)(1 - F_U) for gamma_eq ~ min(gamma_R, gamma_U).
double cdf_snr_equivalent(const RisCoefficients& ris, const UowcCoefficients& uowc, double gamma);
double sf_snr_equivalent(const RisCoefficients& ris, const UowcCoefficients& uowc, double gamma);

}  // namespace rissec
