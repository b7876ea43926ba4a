// SPDX-License-Identifier: Apache-2.0
//
// Secrecy metrics of the dual-hop link against the RIS-assisted
// eavesdropper: average secrecy capacity (nats), exact and lower-bound
// secrecy outage probability, and strictly positive secrecy capacity.
//
// Each metric has a quadrature path over the exact CDFs (canonical) and a
// closed-form series path built from Meijer-G terms. The closed forms are
// truncated infinite series; their convergence diagnostics travel with the
// value.
#pragma once

#include "rissec/channel.hpp"
#include "rissec/quadrature.hpp"

#include <optional>
#include <string>

namespace rissec {

enum class Method { ClosedForm, Quadrature, MonteCarlo };

std::string to_string(Method m);

struct SecrecyQuery {
    double epsilon0_bits = 0.0;
    /// Truncation cap for every n1 / n2 series.
    unsigned max_terms = 200;

    double phi() const;
    void validate() const;
};

struct MetricEstimate {
    double value = 0.0;
    Method method = Method::Quadrature;
    /// Routing or approximation remarks ("" when none).
    std::string note;

    // series diagnostics
    unsigned terms = 0;
    double last_term = 0.0;
    bool converged = true;

    /// Quadrature error estimate or series error estimate.
    double error_estimate = 0.0;
    /// Monte-Carlo only.
    std::optional<double> std_error;
    /// Set for probabilities outside [0, 1]; the value is left untouched.
    bool out_of_range = false;
};

/// Tolerances used by the metric quadratures unless the caller overrides.
QuadraturePolicy metric_policy();

// --- average secrecy capacity -------------------------------------------

MetricEstimate asc_quadrature(const RisCoefficients& ris, const UowcCoefficients& uowc,
                              const EveCoefficients& eve, const QuadraturePolicy& policy = metric_policy());

/// Double series over the xi terms. Needs integer Lambda on both optical
/// branches; otherwise the quadrature value is returned with a routing note.
MetricEstimate asc_closed(const RisCoefficients& ris, const UowcCoefficients& uowc,
                          const EveCoefficients& eve, const SecrecyQuery& query);

/// Analytically continued integral of g^{u/2} / (1 + g).
double xi1(double upsilon2);
/// Same with exponent (u1 + u2) / 2.
double xi2(double upsilon1, double upsilon2);
/// Continued integral of g^{u/2} / (1 + g) * G^{1,1}_{1,2}(Psi g^Lambda | 1; chi, 0).
/// Lambda must be a positive integer (UnsupportedParameters otherwise).
double xi3(const UowcBranch& branch, double upsilon2);
double xi4(const UowcBranch& branch, double upsilon1, double upsilon2);

// --- secrecy outage ---------------------------------------------------------

/// Pr{g_eq <= phi g_E + phi - 1} by quadrature over the eavesdropper law.
MetricEstimate sop_exact_quadrature(const RisCoefficients& ris, const UowcCoefficients& uowc,
                                    const EveCoefficients& eve, const SecrecyQuery& query,
                                    const QuadraturePolicy& policy = metric_policy());

/// Pr{g_eq <= phi g_E}.
MetricEstimate sop_lower_quadrature(const RisCoefficients& ris, const UowcCoefficients& uowc,
                                    const EveCoefficients& eve, const SecrecyQuery& query,
                                    const QuadraturePolicy& policy = metric_policy());

/// Closed-form lower bound. Needs 2 Lambda integer on both branches; routes
/// to quadrature (with a note) otherwise.
MetricEstimate sop_lower_closed(const RisCoefficients& ris, const UowcCoefficients& uowc,
                                const EveCoefficients& eve, const SecrecyQuery& query);

/// Exact-SOP triple series with a reconstructed outer coefficient. Off
/// unless `experimental` is true (throws UnsupportedParameters), and needs
/// integer Lambda. The reported note carries the deviation from quadrature.
MetricEstimate sop_exact_series(const RisCoefficients& ris, const UowcCoefficients& uowc,
                                const EveCoefficients& eve, const SecrecyQuery& query,
                                bool experimental);

/// 1 - SOP_E(eps0 = 0) on the quadrature path.
MetricEstimate spsc(const RisCoefficients& ris, const UowcCoefficients& uowc, const EveCoefficients& eve,
                    const QuadraturePolicy& policy = metric_policy());

/// 1 - SOP_L closed form at phi = 1.
MetricEstimate spsc_closed(const RisCoefficients& ris, const UowcCoefficients& uowc,
                           const EveCoefficients& eve, const SecrecyQuery& query);

// --- closed-form building blocks (exposed for testing) ------------------------

/// Integral of g^{u/2 + Ke2} exp(-Ke3 sqrt g).
double sop_r1(const EveCoefficients& eve, double upsilon1);

/// Integral of g^{c} exp(-Ke3 sqrt g) G^{1,1}_{1,2}(Psi (phi g)^Lambda | 1; chi, 0)
/// with c = Ke2 + u/2 (u = 0 gives R2). Returns log|value| and sign.
struct LogTerm {
    double log_abs = 0.0;
    int sign = 1;
    double value() const;
};
LogTerm sop_r_term(const EveCoefficients& eve, const UowcBranch& branch, double phi, double upsilon1);

}  // namespace rissec
