// SPDX-License-Identifier: Apache-2.0
//
// Gamma-family special functions shared by the closed-form metric
// expressions: complex log-gamma, regularized incomplete gamma, the
// analytically continued Beta function, generalized binomials and the
// Delta(y, z) parameter sequence used by Meijer-G multiplication identities.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rissec {

/// Principal-branch log Gamma. Lanczos (g = 607/128, 15 coefficients) for
/// Re z >= 0.5, reflection below. Throws PoleError within 1e-12 of a
/// non-positive integer.
std::complex<double> ln_gamma(std::complex<double> z);

/// log|Gamma(x)| and the sign of Gamma(x) for real x.
struct SignedLog {
    double log_abs = 0.0;
    int sign = 1;
};
SignedLog ln_gamma_signed(double x);

/// log Gamma for x > 0.
double ln_gamma(double x);

/// P(a, x) = lower_gamma(a, x) / Gamma(a). Throws DomainError for a <= 0 or x < 0.
double regularized_lower_gamma(double a, double x);

/// Q(a, x) = 1 - P(a, x), evaluated without cancellation in the upper tail.
double regularized_upper_gamma(double a, double x);

namespace detail {
// The two independent evaluators behind regularized_lower_gamma. Exposed so
// tests can cross-check them against each other.
double lower_gamma_series(double a, double x);
double upper_gamma_continued_fraction(double a, double x);
}  // namespace detail

/// Beta(x, y) = Gamma(x) Gamma(y) / Gamma(x + y), continued to negative
/// arguments. Throws PoleError when x, y or x + y is within 1e-9 of a
/// non-positive integer.
double beta_ac(double x, double y);

/// alpha (alpha - 1) ... (alpha - k + 1) / k!
double gen_binomial(double alpha, unsigned k);

/// z/y, (z + 1)/y, ..., (z + y - 1)/y. Throws DomainError for y <= 0.
std::vector<double> delta_seq(int y, double z);

/// True when x is within tol of a non-positive integer.
bool near_nonpositive_integer(double x, double tol);

/// Neumaier-compensated accumulator for long alternating series.
class CompensatedSum {
public:
    void add(double v) noexcept;
    double value() const noexcept { return sum_ + comp_; }
    /// Largest |term| seen so far; with value() it measures cancellation.
    double max_abs_term() const noexcept { return max_abs_; }
    std::size_t count() const noexcept { return count_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    double max_abs_ = 0.0;
    std::size_t count_ = 0;
};

double compensated_sum(std::span<const double> values);

}  // namespace rissec
