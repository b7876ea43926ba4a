// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace rissec {

enum class SemiInfiniteMap {
    /// Split at `split`; map (split, inf) through x = split / t.
    Reciprocal,
};

struct QuadraturePolicy {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    std::size_t max_subdivisions = 4000;
    SemiInfiniteMap map = SemiInfiniteMap::Reciprocal;
    double split = 1.0;

    /// Throws DomainError unless tolerances are positive, max_subdivisions >= 1
    /// and split > 0.
    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    std::size_t subdivisions = 0;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) on [a, b]. Endpoints are never evaluated.
/// Throws QuadratureError (carrying the best estimate) when the tolerance is
/// not met within policy.max_subdivisions.
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadraturePolicy& policy = {});

/// Adaptive integral over [nodes.front(), nodes.back()] with the interior
/// nodes as initial panel boundaries (global error budget).
QuadratureResult integrate_panels(const Integrand& f, std::span<const double> nodes,
                                  const QuadraturePolicy& policy = {});

/// Integral over (0, inf): [0, split] directly, (split, inf) via x = split/t.
QuadratureResult integrate_semi_infinite(const Integrand& f,
                                         const QuadraturePolicy& policy = {});

/// Integral over (0, inf) with user breakpoints (strictly increasing,
/// positive). All panels share one global error budget; the last panel
/// (b_last, inf) uses the reciprocal map.
QuadratureResult integrate_partitioned(const Integrand& f, std::span<const double> breakpoints,
                                       const QuadraturePolicy& policy = {});

}  // namespace rissec
