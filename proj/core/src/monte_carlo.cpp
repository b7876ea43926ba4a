// SPDX-License-Identifier: Apache-2.0
#include "rissec/monte_carlo.hpp"

#include "rissec/errors.hpp"
#include "rissec/rng.hpp"
#include "rissec/specfun.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace rissec {
namespace {

// Substream ids used by the standalone samplers.
constexpr std::uint64_t kFirstHopStream = 0;
constexpr std::uint64_t kSecondHopStream = 1;

double nakagami(RandomStream& rng, double m, double omega) { return std::sqrt(rng.gamma(m) * omega / m); }

double uowc_draw(RandomStream& rng, const UowcLinkSpec& spec, double eta) {
    double I;
    if (rng.uniform() < spec.lambda) {
        I = spec.sigma * rng.exponential();
    } else {
        I = spec.q * std::pow(rng.gamma(spec.p), 1.0 / spec.r);
    }
    return spec.detection == Detection::Heterodyne ? eta * I : eta * I * I;
}

double fitted_draw(RandomStream& rng, const RisCoefficients& c) {
    const double amp = c.b * rng.gamma(c.a + 1.0);
    return amp * amp * c.avg_snr;
}

// Sum of alpha_i beta_i with the alpha draws supplied by the caller.
double cascade(RandomStream& rng, const RisLinkSpec& spec, const double* alpha) {
    double acc = 0.0;
    for (unsigned i = 0; i < spec.elements; ++i) acc += alpha[i] * nakagami(rng, spec.m_hop2, spec.omega_hop2);
    return acc;
}

// Per-sample quantities accumulated per batch, in this order.
enum Slot { kAsc, kSopE, kSopL, kSpsc, kSlots };
using Sums = std::array<double, 2 * kSlots>;  // min form, then harmonic form

void accumulate(Sums& s, double gr, double gu, double ge, double phi) {
    const double eq[2] = {std::min(gr, gu), gr * gu / (gr + gu + 1.0)};
    const double le = std::log1p(ge);
    for (int f = 0; f < 2; ++f) {
        double* out = s.data() + f * kSlots;
        out[kAsc] += std::max(std::log1p(eq[f]) - le, 0.0);
        out[kSopE] += eq[f] <= phi * ge + phi - 1.0 ? 1.0 : 0.0;
        out[kSopL] += eq[f] <= phi * ge ? 1.0 : 0.0;
        out[kSpsc] += eq[f] > ge ? 1.0 : 0.0;
    }
}

struct BatchResult {
    Sums sums{};
    std::uint64_t n = 0;
};

BatchResult run_batch(const ScenarioConfig& cfg, const RisCoefficients& relay_fit, const RisCoefficients& eve_fit,
                      double eta, std::uint64_t batch, std::uint64_t n) {
    RandomStream rng(cfg.seed, batch);
    BatchResult out;
    out.n = n;
    const double phi = std::exp2(cfg.epsilon0_bits);
    std::vector<double> alpha_r(cfg.relay_link.elements), alpha_e(cfg.eve_link.elements);
    for (std::uint64_t k = 0; k < n; ++k) {
        double gr, ge;
        if (cfg.model == SamplingModel::Fitted) {
            gr = fitted_draw(rng, relay_fit);
            ge = fitted_draw(rng, eve_fit);
        } else {
            for (double& a : alpha_r) a = nakagami(rng, cfg.relay_link.m_hop1, cfg.relay_link.omega_hop1);
            const double sr = cascade(rng, cfg.relay_link, alpha_r.data());
            const double* ae = alpha_r.data();
            if (cfg.scenario == Scenario::I) {
                for (double& a : alpha_e) a = nakagami(rng, cfg.eve_link.m_hop1, cfg.eve_link.omega_hop1);
                ae = alpha_e.data();
            }
            const double se = cascade(rng, cfg.eve_link, ae);
            gr = sr * sr * cfg.relay_link.avg_snr;
            ge = se * se * cfg.eve_link.avg_snr;
        }
        const double gu = uowc_draw(rng, cfg.uowc_link, eta);
        accumulate(out.sums, gr, gu, ge, phi);
    }
    return out;
}

McMetric batch_mean(const std::vector<BatchResult>& batches, int slot, std::uint64_t total) {
    CompensatedSum acc;
    for (const BatchResult& b : batches) acc.add(b.sums[slot]);
    McMetric m;
    m.mean = acc.value() / static_cast<double>(total);
    const std::size_t B = batches.size();
    if (B < 2) {
        m.std_error = std::numeric_limits<double>::quiet_NaN();
        return m;
    }
    // Batch sizes differ by at most one; weight each batch mean by its share.
    CompensatedSum var;
    for (const BatchResult& b : batches) {
        const double w = static_cast<double>(b.n) / static_cast<double>(total);
        const double d = b.sums[slot] / static_cast<double>(b.n) - m.mean;
        var.add(w * w * d * d);
    }
    m.std_error = std::sqrt(var.value() * static_cast<double>(B) / static_cast<double>(B - 1));
    return m;
}

}  // namespace

std::string to_string(Scenario s) { return s == Scenario::I ? "I" : "II"; }
std::string to_string(SamplingModel m) { return m == SamplingModel::Physical ? "physical" : "fitted"; }

void ScenarioConfig::validate() const {
    relay_link.validate();
    eve_link.validate();
    uowc_link.validate();
    if (!(epsilon0_bits >= 0.0) || !std::isfinite(epsilon0_bits)) {
        throw DomainError("ScenarioConfig: epsilon0 must be non-negative");
    }
    if (samples < 1) throw DomainError("ScenarioConfig: need at least one sample");
    if (batches < 1) throw DomainError("ScenarioConfig: need at least one batch");
    if (scenario == Scenario::II && model == SamplingModel::Physical &&
        (relay_link.elements != eve_link.elements || relay_link.m_hop1 != eve_link.m_hop1 ||
         relay_link.omega_hop1 != eve_link.omega_hop1)) {
        throw DomainError("ScenarioConfig: scenario II needs S1 = S2 and an identical first hop");
    }
}

std::vector<double> sample_nakagami(double m, double omega, std::size_t n, std::uint64_t seed) {
    if (!(m >= 0.5) || !(omega > 0.0)) throw DomainError("sample_nakagami: need m >= 0.5 and omega > 0");
    RandomStream rng(seed, kFirstHopStream);
    std::vector<double> out(n);
    for (double& x : out) x = nakagami(rng, m, omega);
    return out;
}

FirstHopDraws sample_first_hop(const RisLinkSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    RandomStream rng(seed, kFirstHopStream);
    FirstHopDraws d;
    d.elements = spec.elements;
    d.alpha.resize(n * spec.elements);
    for (double& a : d.alpha) a = nakagami(rng, spec.m_hop1, spec.omega_hop1);
    return d;
}

std::vector<double> sample_ris_snr(const RisLinkSpec& spec, std::size_t n, std::uint64_t seed,
                                   const FirstHopDraws* shared) {
    spec.validate();
    FirstHopDraws own;
    if (shared == nullptr) {
        own = sample_first_hop(spec, n, seed);
        shared = &own;
    } else if (shared->elements != spec.elements || shared->samples() != n) {
        throw DomainError("sample_ris_snr: shared first-hop draws do not match (n, S)");
    }
    RandomStream rng(seed, kSecondHopStream);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = cascade(rng, spec, shared->alpha.data() + k * spec.elements);
        out[k] = s * s * spec.avg_snr;
    }
    return out;
}

std::vector<double> sample_ris_snr_fitted(const RisLinkSpec& spec, std::size_t n, std::uint64_t seed) {
    const RisCoefficients c = ris_coefficients(spec);
    RandomStream rng(seed, kFirstHopStream);
    std::vector<double> out(n);
    for (double& g : out) g = fitted_draw(rng, c);
    return out;
}

std::vector<double> sample_uowc_snr(const UowcLinkSpec& spec, std::size_t n, std::uint64_t seed) {
    const double eta = uowc_coefficients(spec).eta;
    RandomStream rng(seed, kFirstHopStream);
    std::vector<double> out(n);
    for (double& g : out) g = uowc_draw(rng, spec, eta);
    return out;
}

McReport estimate_metrics(const ScenarioConfig& config) {
    config.validate();
    const RisCoefficients relay_fit = ris_coefficients(config.relay_link);
    const RisCoefficients eve_fit = ris_coefficients(config.eve_link);
    const double eta = uowc_coefficients(config.uowc_link).eta;

    const std::uint64_t n = config.samples;
    const std::uint64_t B = std::min<std::uint64_t>(config.batches, n);
    std::vector<BatchResult> results(B);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t k = next++; k < B; k = next++) {
            const std::uint64_t size = n / B + (k < n % B ? 1 : 0);
            results[k] = run_batch(config, relay_fit, eve_fit, eta, k, size);
        }
    };
    unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, B));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    McReport r;
    McMetrics* forms[2] = {&r.min_form, &r.harmonic_form};
    for (int f = 0; f < 2; ++f) {
        forms[f]->asc = batch_mean(results, f * kSlots + kAsc, n);
        forms[f]->sop_exact = batch_mean(results, f * kSlots + kSopE, n);
        forms[f]->sop_lower = batch_mean(results, f * kSlots + kSopL, n);
        forms[f]->spsc = batch_mean(results, f * kSlots + kSpsc, n);
    }
    r.generator = generator_name();
    r.seed = config.seed;
    r.samples = n;
    r.batches = static_cast<unsigned>(B);
    r.scenario = config.scenario;
    r.model = config.model;
    return r;
}

double dkw_epsilon(std::size_t n, double confidence) {
    if (n == 0 || !(confidence > 0.0 && confidence < 1.0)) throw DomainError("dkw_epsilon: bad arguments");
    return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

}  // namespace rissec
