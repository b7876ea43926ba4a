// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace rissec {

/// Parameters of G^{m,n}_{p,q}(x | a; b). The first n entries of `a` and the
/// first m entries of `b` feed the numerator Gamma factors.
struct MeijerGSpec {
    std::vector<double> a;
    std::vector<double> b;
    std::size_t m = 0;
    std::size_t n = 0;

    std::size_t p() const noexcept { return a.size(); }
    std::size_t q() const noexcept { return b.size(); }

    /// Throws DomainError when the orders exceed the parameter counts.
    void validate() const;
};

/// A real number held as mantissa * exp(log_scale) so that results far
/// outside the double range (e.g. exp(-1000)) keep their relative accuracy.
struct ScaledReal {
    double mantissa = 0.0;
    double log_scale = 0.0;

    double value() const { return mantissa == 0.0 ? 0.0 : mantissa * std::exp(log_scale); }
    /// log|value|; -inf for zero.
    double log_abs() const;
};

struct MeijerGDiagnostics {
    double contour = 0.0;      ///< Re(s) of the vertical line
    double truncation = 0.0;   ///< |Im s| where the tail was cut
    std::size_t residues = 0;  ///< poles on the wrong side of the line
    bool perturbed = false;    ///< a pole collision was resolved by averaging
    std::size_t evaluations = 0;
};

/// G^{m,n}_{p,q}(x | a; b) for real parameters and x > 0 by Mellin-Barnes
/// integration along Re(s) = c. When no vertical line separates the two
/// pole families the finitely many poles on the wrong side are added back
/// as residues. Colliding poles are resolved by symmetric +-1e-6
/// perturbation of one parameter.
///
/// Throws ConvergenceError when the integrand does not decay along the
/// line (m + n <= (p + q) / 2) and PoleError when perturbation cannot
/// separate the poles.
ScaledReal meijer_g_scaled(const MeijerGSpec& spec, double x, MeijerGDiagnostics* diag = nullptr);

double meijer_g(const MeijerGSpec& spec, double x);

}  // namespace rissec
