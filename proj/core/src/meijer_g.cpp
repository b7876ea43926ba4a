// SPDX-License-Identifier: Apache-2.0
#include "rissec/meijer_g.hpp"

#include "rissec/errors.hpp"
#include "rissec/quadrature.hpp"
#include "rissec/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace rissec {
namespace {

using cplx = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCollisionTol = 1e-7;
constexpr double kPerturbation = 1e-6;
constexpr int kMaxPerturbationDepth = 3;
constexpr std::size_t kMaxResidues = 2000;

// Which Gamma factor of the integrand a parameter feeds.
enum class Role { LeftNum, RightNum, LeftDen, RightDen };

struct Pole {
    double s;
    bool left;          // from a Gamma(b_j + s) factor
    std::size_t param;  // index into b (left) or a (right)
    int k;              // s = -b_j - k  or  s = 1 - a_k + k
};

struct Collision {
    bool in_a;
    std::size_t index;
};

bool is_nonpositive_integer(double z, double tol) { return near_nonpositive_integer(z, tol); }

class Integrand {
public:
    Integrand(const MeijerGSpec& g, double x) : g_(g), logx_(std::log(x)) {}

    // log of h(s) x^{-s}; nullopt when a reciprocal Gamma vanishes.
    std::optional<cplx> log_value(cplx s) const {
        cplx acc = -s * logx_;
        for (std::size_t j = 0; j < g_.q(); ++j) {
            if (j < g_.m) {
                acc += ln_gamma(g_.b[j] + s);
            } else {
                const cplx z = 1.0 - g_.b[j] - s;
                if (std::abs(z.imag()) < 1e-14 && is_nonpositive_integer(z.real(), 1e-14)) return std::nullopt;
                acc -= ln_gamma(z);
            }
        }
        for (std::size_t k = 0; k < g_.p(); ++k) {
            if (k < g_.n) {
                acc += ln_gamma(1.0 - g_.a[k] - s);
            } else {
                const cplx z = g_.a[k] + s;
                if (std::abs(z.imag()) < 1e-14 && is_nonpositive_integer(z.real(), 1e-14)) return std::nullopt;
                acc -= ln_gamma(z);
            }
        }
        return acc;
    }

    // Real-axis log-magnitude of the numerator factors and x^{-c}: convex in
    // c between consecutive numerator poles, used to place the contour.
    double steering(double c) const {
        double acc = -c * logx_;
        for (std::size_t j = 0; j < g_.m; ++j) acc += ln_gamma_signed(g_.b[j] + c).log_abs;
        for (std::size_t k = 0; k < g_.n; ++k) acc += ln_gamma_signed(1.0 - g_.a[k] - c).log_abs;
        return acc;
    }

    double logx() const { return logx_; }

private:
    const MeijerGSpec& g_;
    double logx_;
};

double golden_min(const Integrand& f, double lo, double hi, double* fmin) {
    constexpr double r = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f.steering(x1), f2 = f.steering(x2);
    for (int it = 0; it < 100 && (b - a) > 1e-10 * (1.0 + std::abs(a)); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f.steering(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f.steering(x2);
        }
    }
    const double c = 0.5 * (a + b);
    if (fmin) *fmin = f.steering(c);
    return c;
}

// Minimize over an interval that may be unbounded on one side. The
// steering function is convex there and grows without bound at a pole.
double minimize_gap(const Integrand& f, double lo, double hi, double* fmin) {
    if (std::isinf(lo) && std::isinf(hi)) {
        throw ConvergenceError("meijer_g: m = n = 0 has no decaying contour integrand");
    }
    auto margin = [](double w) { return std::min(0.02 * w, 0.05); };
    if (std::isinf(hi)) {
        double step = 1.0;
        double left = lo + 1e-3;
        double right = lo + step;
        double prev = f.steering(right);
        for (int i = 0; i < 60; ++i) {
            step *= 2.0;
            const double cand = lo + step;
            const double v = f.steering(cand);
            if (v > prev) {
                right = cand;
                break;
            }
            left = lo + 0.5 * step;
            prev = v;
            right = cand;
        }
        return golden_min(f, std::max(left - step, lo + margin(1.0)), right, fmin);
    }
    if (std::isinf(lo)) {
        double step = 1.0;
        double right = hi - 1e-3;
        double left = hi - step;
        double prev = f.steering(left);
        for (int i = 0; i < 60; ++i) {
            step *= 2.0;
            const double cand = hi - step;
            const double v = f.steering(cand);
            if (v > prev) {
                left = cand;
                break;
            }
            right = hi - 0.5 * step;
            prev = v;
            left = cand;
        }
        return golden_min(f, left, std::min(right + step, hi - margin(1.0)), fmin);
    }
    const double w = hi - lo;
    return golden_min(f, lo + margin(w), hi - margin(w), fmin);
}

struct Contour {
    double c = 0.0;
    std::vector<Pole> misplaced;
};

Contour place_contour(const MeijerGSpec& g, const Integrand& f) {
    double lo = -kInf, hi = kInf;
    for (std::size_t j = 0; j < g.m; ++j) lo = std::max(lo, -g.b[j]);
    for (std::size_t k = 0; k < g.n; ++k) hi = std::min(hi, 1.0 - g.a[k]);

    Contour out;
    if (lo < hi) {
        out.c = minimize_gap(f, lo, hi, nullptr);
        return out;
    }

    // No separating line: try every gap between numerator poles in a window
    // around the overlap and keep the one with the smallest integrand scale.
    const double wlo = hi - 1.0, whi = lo + 1.0;
    std::vector<double> poles;
    for (std::size_t j = 0; j < g.m; ++j) {
        for (int k = 0; -g.b[j] - k >= wlo; ++k) {
            if (-g.b[j] - k <= whi) poles.push_back(-g.b[j] - k);
            if (poles.size() > kMaxResidues) break;
        }
    }
    for (std::size_t i = 0; i < g.n; ++i) {
        for (int k = 0; 1.0 - g.a[i] + k <= whi; ++k) {
            if (1.0 - g.a[i] + k >= wlo) poles.push_back(1.0 - g.a[i] + k);
            if (poles.size() > kMaxResidues) break;
        }
    }
    if (poles.size() > kMaxResidues) throw ConvergenceError("meijer_g: too many misplaced poles");
    std::sort(poles.begin(), poles.end());
    double best = kInf;
    bool found = false;
    for (std::size_t i = 1; i < poles.size(); ++i) {
        if (poles[i] - poles[i - 1] < 1e-6) continue;
        double v = 0.0;
        const double c = minimize_gap(f, poles[i - 1], poles[i], &v);
        if (v < best) {
            best = v;
            out.c = c;
            found = true;
        }
    }
    if (!found) throw PoleError("meijer_g: no pole-free gap for the contour");

    for (std::size_t j = 0; j < g.m; ++j) {
        for (int k = 0; -g.b[j] - k > out.c; ++k) out.misplaced.push_back({-g.b[j] - k, true, j, k});
    }
    for (std::size_t i = 0; i < g.n; ++i) {
        for (int k = 0; 1.0 - g.a[i] + k < out.c; ++k) out.misplaced.push_back({1.0 - g.a[i] + k, false, i, k});
    }
    if (out.misplaced.size() > kMaxResidues) throw ConvergenceError("meijer_g: too many misplaced poles");
    return out;
}

// Gamma factors of the integrand that have a pole at s (numerator) or whose
// reciprocal vanishes there (denominator).
struct PoleCensus {
    std::vector<Collision> numerators;
    int denominators = 0;
};

PoleCensus census(const MeijerGSpec& g, double s) {
    PoleCensus out;
    for (std::size_t j = 0; j < g.q(); ++j) {
        if (j < g.m) {
            if (is_nonpositive_integer(g.b[j] + s, kCollisionTol)) out.numerators.push_back({false, j});
        } else if (is_nonpositive_integer(1.0 - g.b[j] - s, kCollisionTol)) {
            ++out.denominators;
        }
    }
    for (std::size_t k = 0; k < g.p(); ++k) {
        if (k < g.n) {
            if (is_nonpositive_integer(1.0 - g.a[k] - s, kCollisionTol)) out.numerators.push_back({true, k});
        } else if (is_nonpositive_integer(g.a[k] + s, kCollisionTol)) {
            ++out.denominators;
        }
    }
    return out;
}

struct SignedTerm {
    double log_abs;
    int sign;
};

// Residue of h(s) x^{-s} at a simple numerator pole, as it enters G after
// moving the contour (the sign flip for right-family poles is folded in).
SignedTerm residue(const MeijerGSpec& g, const Pole& pole, double logx) {
    const double s = pole.s;
    double acc = -s * logx - std::lgamma(static_cast<double>(pole.k) + 1.0);
    int sign = (pole.k % 2 == 0) ? 1 : -1;
    auto mul = [&](double z) {
        const SignedLog v = ln_gamma_signed(z);
        acc += v.log_abs;
        sign *= v.sign;
    };
    auto div = [&](double z) {
        const SignedLog v = ln_gamma_signed(z);
        acc -= v.log_abs;
        sign *= v.sign;
    };
    for (std::size_t j = 0; j < g.q(); ++j) {
        if (j < g.m) {
            if (!(pole.left && pole.param == j)) mul(g.b[j] + s);
        } else {
            div(1.0 - g.b[j] - s);
        }
    }
    for (std::size_t k = 0; k < g.p(); ++k) {
        if (k < g.n) {
            if (!(!pole.left && pole.param == k)) mul(1.0 - g.a[k] - s);
        } else {
            div(g.a[k] + s);
        }
    }
    return {acc, sign};
}

ScaledReal combine(std::span<const SignedTerm> terms) {
    double lmax = -kInf;
    for (const auto& t : terms) lmax = std::max(lmax, t.log_abs);
    if (std::isinf(lmax)) return {0.0, 0.0};
    CompensatedSum acc;
    for (const auto& t : terms) acc.add(t.sign * std::exp(t.log_abs - lmax));
    return {acc.value(), lmax};
}

ScaledReal evaluate(const MeijerGSpec& g, double x, int depth, MeijerGDiagnostics* diag);

ScaledReal perturbed(const MeijerGSpec& g, double x, const Collision& who, int depth,
                     MeijerGDiagnostics* diag) {
    if (depth >= kMaxPerturbationDepth) {
        throw PoleError("meijer_g: perturbation cannot separate colliding poles");
    }
    const double delta = kPerturbation * (1.0 + 0.618 * depth);
    MeijerGSpec plus = g, minus = g;
    auto& pp = who.in_a ? plus.a[who.index] : plus.b[who.index];
    auto& pm = who.in_a ? minus.a[who.index] : minus.b[who.index];
    pp += delta;
    pm -= delta;
    const ScaledReal up = evaluate(plus, x, depth + 1, diag);
    const ScaledReal down = evaluate(minus, x, depth + 1, diag);
    if (diag) diag->perturbed = true;
    const SignedTerm terms[2] = {
        {up.mantissa == 0.0 ? -kInf : std::log(std::abs(up.mantissa)) + up.log_scale, up.mantissa < 0 ? -1 : 1},
        {down.mantissa == 0.0 ? -kInf : std::log(std::abs(down.mantissa)) + down.log_scale,
         down.mantissa < 0 ? -1 : 1},
    };
    ScaledReal sum = combine(terms);
    sum.mantissa *= 0.5;
    return sum;
}

ScaledReal evaluate(const MeijerGSpec& g, double x, int depth, MeijerGDiagnostics* diag) {
    const Integrand f(g, x);

    // Collisions among numerator poles are only harmful when a residue must
    // be taken there, or when they straddle the contour (left meets right).
    for (std::size_t j = 0; j < g.m; ++j) {
        for (std::size_t k = 0; k < g.n; ++k) {
            const double d = g.a[k] - g.b[j];
            if (d > 0.5 && std::abs(d - std::round(d)) <= kCollisionTol) {
                return perturbed(g, x, Collision{true, k}, depth, diag);
            }
        }
    }

    const Contour contour = place_contour(g, f);
    std::vector<SignedTerm> terms;
    terms.reserve(contour.misplaced.size() + 1);
    for (const Pole& pole : contour.misplaced) {
        const PoleCensus pc = census(g, pole.s);
        const int order = static_cast<int>(pc.numerators.size()) - pc.denominators;
        if (order <= 0) continue;
        if (pc.numerators.size() > 1 || pc.denominators > 0) {
            return perturbed(g, x, pc.numerators.back(), depth, diag);
        }
        terms.push_back(residue(g, pole, f.logx()));
    }

    const double c = contour.c;
    const auto l0opt = f.log_value(cplx(c, 0.0));
    const double l0 = l0opt ? l0opt->real() : f.steering(c);

    double tmin = 2.0 + std::abs(c);
    for (double v : g.a) tmin = std::max(tmin, 2.0 + std::abs(v));
    for (double v : g.b) tmin = std::max(tmin, 2.0 + std::abs(v));
    const double cutoff = std::log(1e-17);
    double tmax = 0.0;
    for (double t = 0.5; ; t *= 1.15) {
        if (t > 1e4) throw ConvergenceError("meijer_g: contour integrand does not decay");
        const auto lv = f.log_value(cplx(c, t));
        if (t > tmin && (!lv || lv->real() - l0 < cutoff)) {
            tmax = t;
            break;
        }
    }

    const double freq = 1.0 + std::abs(f.logx()) / std::numbers::pi;
    const auto panels = static_cast<std::size_t>(std::ceil(tmax * freq / 0.75)) + 4;
    std::vector<double> nodes(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) nodes[i] = tmax * static_cast<double>(i) / panels;
    std::size_t evals = 0;
    const rissec::Integrand line = [&](double t) {
        ++evals;
        const auto lv = f.log_value(cplx(c, t));
        if (!lv) return 0.0;
        return std::exp(*lv - l0).real() / std::numbers::pi;
    };
    QuadraturePolicy policy;
    policy.abs_tol = 1e-15;
    policy.rel_tol = 1e-13;
    policy.max_subdivisions = 20000;
    double integral = 0.0;
    try {
        integral = integrate_panels(line, nodes, policy).value;
    } catch (const QuadratureError& e) {
        if (!(e.error() <= 1e-10 * std::max(1.0, std::abs(e.estimate())))) {
            throw ConvergenceError(std::string("meijer_g: contour quadrature failed: ") + e.what());
        }
        integral = e.estimate();
    }

    if (integral != 0.0) terms.push_back({std::log(std::abs(integral)) + l0, integral < 0 ? -1 : 1});
    if (diag) {
        diag->contour = c;
        diag->truncation = tmax;
        diag->residues += contour.misplaced.size();
        diag->evaluations += evals;
    }
    return combine(terms);
}

}  // namespace

void MeijerGSpec::validate() const {
    if (m > b.size()) throw DomainError("MeijerGSpec: m exceeds the number of b parameters");
    if (n > a.size()) throw DomainError("MeijerGSpec: n exceeds the number of a parameters");
    for (double v : a) {
        if (!std::isfinite(v)) throw DomainError("MeijerGSpec: non-finite a parameter");
    }
    for (double v : b) {
        if (!std::isfinite(v)) throw DomainError("MeijerGSpec: non-finite b parameter");
    }
}

double ScaledReal::log_abs() const {
    if (mantissa == 0.0) return -kInf;
    return std::log(std::abs(mantissa)) + log_scale;
}

ScaledReal meijer_g_scaled(const MeijerGSpec& spec, double x, MeijerGDiagnostics* diag) {
    spec.validate();
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("meijer_g: argument must be positive and finite");
    const double decay = static_cast<double>(spec.m + spec.n) - 0.5 * static_cast<double>(spec.p() + spec.q());
    if (!(decay > 0.0)) {
        throw ConvergenceError("meijer_g: orders give no exponential decay along a vertical contour");
    }
    if (diag) *diag = MeijerGDiagnostics{};
    return evaluate(spec, x, 0, diag);
}

double meijer_g(const MeijerGSpec& spec, double x) { return meijer_g_scaled(spec, x).value(); }

}  // namespace rissec
