// SPDX-License-Identifier: Apache-2.0
#include "rissec/quadrature.hpp"

#include "rissec/errors.hpp"
#include "rissec/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

namespace rissec {
namespace {

// Kronrod 15-point abscissae (descending, last is the centre) and weights;
// every other abscissa belongs to the embedded 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    std::size_t segment;
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

struct Segment {
    const Integrand* f;
    double a;
    double b;
};

Panel gk15(const Segment& s, std::size_t idx, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = (*s.f)(centre);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{}, f2{};
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = (*s.f)(centre - dx);
        f2[j] = (*s.f)(centre + dx);
        resk += kWgk[j] * (f1[j] + f2[j]);
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
    }
    const double mean = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }
    resk *= half;
    resg *= half;
    resasc *= std::abs(half);
    resabs *= std::abs(half);
    double err = std::abs(resk - resg);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    const double eps_floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    err = std::max(err, eps_floor);
    if (!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
    return Panel{idx, a, b, resk, err};
}

QuadratureResult adaptive(std::span<const Segment> segments, const QuadraturePolicy& policy) {
    policy.validate();
    std::priority_queue<Panel> heap;
    std::size_t evals = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (segments[i].b > segments[i].a) {
            heap.push(gk15(segments[i], i, segments[i].a, segments[i].b));
            evals += 15;
        }
    }
    std::size_t subdivisions = 0;
    auto totals = [&heap]() {
        // Re-sum from scratch to avoid drift from incremental updates.
        auto copy = heap;
        CompensatedSum v, e;
        while (!copy.empty()) {
            v.add(copy.top().value);
            e.add(copy.top().error);
            copy.pop();
        }
        return std::pair{v.value(), e.value()};
    };
    auto [value, error] = totals();
    double running_error = error;
    double running_value = value;
    while (!heap.empty()) {
        const double tol = std::max(policy.abs_tol, policy.rel_tol * std::abs(running_value));
        if (running_error <= tol) break;
        if (subdivisions >= policy.max_subdivisions) break;
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Panel cannot be split further in floating point.
            heap.push(Panel{worst.segment, worst.a, worst.b, worst.value, 0.0});
            running_error -= worst.error;
            continue;
        }
        const Segment& seg = segments[worst.segment];
        const Panel left = gk15(seg, worst.segment, worst.a, mid);
        const Panel right = gk15(seg, worst.segment, mid, worst.b);
        evals += 30;
        ++subdivisions;
        running_value += left.value + right.value - worst.value;
        running_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if (subdivisions % 256 == 0) {
            std::tie(running_value, running_error) = totals();
        }
    }
    std::tie(value, error) = totals();
    QuadratureResult out{value, error, evals, subdivisions};
    const double tol = std::max(policy.abs_tol, policy.rel_tol * std::abs(value));
    if (!std::isfinite(value) || error > tol) {
        throw QuadratureError("quadrature: tolerance not met (estimate " + std::to_string(value) +
                                  ", error " + std::to_string(error) + ")",
                              value, error);
    }
    return out;
}

}  // namespace

void QuadraturePolicy::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw DomainError("QuadraturePolicy: tolerances must be strictly positive");
    }
    if (max_subdivisions < 1) throw DomainError("QuadraturePolicy: max_subdivisions must be >= 1");
    if (!(split > 0.0)) throw DomainError("QuadraturePolicy: split must be positive");
}

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadraturePolicy& policy) {
    if (!(b >= a)) throw DomainError("integrate: requires a <= b");
    const Segment seg{&f, a, b};
    return adaptive(std::span<const Segment>(&seg, 1), policy);
}

QuadratureResult integrate_panels(const Integrand& f, std::span<const double> nodes,
                                  const QuadraturePolicy& policy) {
    if (nodes.size() < 2) throw DomainError("integrate_panels: need at least two nodes");
    std::vector<Segment> segments;
    segments.reserve(nodes.size() - 1);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!(nodes[i] > nodes[i - 1])) throw DomainError("integrate_panels: nodes must increase");
        segments.push_back(Segment{&f, nodes[i - 1], nodes[i]});
    }
    return adaptive(segments, policy);
}

QuadratureResult integrate_semi_infinite(const Integrand& f, const QuadraturePolicy& policy) {
    const double bp = policy.split;
    return integrate_partitioned(f, std::span<const double>(&bp, 1), policy);
}

QuadratureResult integrate_partitioned(const Integrand& f, std::span<const double> breakpoints,
                                       const QuadraturePolicy& policy) {
    if (breakpoints.empty()) throw DomainError("integrate_partitioned: need at least one breakpoint");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i] > 0.0) || (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))) {
            throw DomainError("integrate_partitioned: breakpoints must be positive and increasing");
        }
    }
    const double last = breakpoints.back();
    const Integrand tail = [&f, last](double t) {
        const double x = last / t;
        if (!std::isfinite(x)) return 0.0;
        const double v = f(x);
        return v == 0.0 ? 0.0 : v * last / (t * t);
    };
    std::vector<Segment> segments;
    segments.reserve(breakpoints.size() + 1);
    double lo = 0.0;
    for (double bp : breakpoints) {
        segments.push_back(Segment{&f, lo, bp});
        lo = bp;
    }
    segments.push_back(Segment{&tail, 0.0, 1.0});
    return adaptive(segments, policy);
}

}  // namespace rissec
