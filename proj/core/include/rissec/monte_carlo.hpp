// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo reference for the secrecy metrics. The physical model draws the
// phase-aligned element sums and the mEGG irradiance directly; the fitted
// model draws from the Gamma-fitted RIS law instead, so comparing the two
// isolates the moment-matching error from formula errors.
#pragma once

#include "rissec/channel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rissec {

/// I: relay and eavesdropper see independent surfaces. II: both receive the
/// same reflected signal, so the first-hop amplitudes are shared.
enum class Scenario { I, II };

enum class SamplingModel { Physical, Fitted };

std::string to_string(Scenario s);
std::string to_string(SamplingModel m);

struct ScenarioConfig {
    RisLinkSpec relay_link;
    RisLinkSpec eve_link;
    UowcLinkSpec uowc_link;
    Scenario scenario = Scenario::I;
    double epsilon0_bits = 0.0;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    SamplingModel model = SamplingModel::Physical;
    unsigned batches = 64;
    /// 0 picks hardware concurrency. Results do not depend on it.
    unsigned threads = 0;

    /// Throws DomainError. Physical sampling in scenario II needs S1 = S2 and
    /// an identical first hop; the fitted model draws the links independently.
    void validate() const;
};

std::vector<double> sample_nakagami(double m, double omega, std::size_t n, std::uint64_t seed);

/// First-hop amplitudes, row-major n x elements.
struct FirstHopDraws {
    unsigned elements = 0;
    std::vector<double> alpha;

    std::size_t samples() const { return elements == 0 ? 0 : alpha.size() / elements; }
};

FirstHopDraws sample_first_hop(const RisLinkSpec& spec, std::size_t n, std::uint64_t seed);

/// (sum_i alpha_i beta_i)^2 gamma_m over the S elements. With `shared`, the
/// alpha draws are reused (throws DomainError on a shape mismatch) and only
/// the second hop is drawn from `seed`.
std::vector<double> sample_ris_snr(const RisLinkSpec& spec, std::size_t n, std::uint64_t seed,
                                   const FirstHopDraws* shared = nullptr);

/// Draws from the Gamma-fitted law of sample_ris_snr.
std::vector<double> sample_ris_snr_fitted(const RisLinkSpec& spec, std::size_t n, std::uint64_t seed);

/// eta_s I^s with I from the exponential / generalized-Gamma mixture.
std::vector<double> sample_uowc_snr(const UowcLinkSpec& spec, std::size_t n, std::uint64_t seed);

struct McMetric {
    double mean = 0.0;
    double std_error = 0.0;
};

struct McMetrics {
    McMetric asc;  // nats
    McMetric sop_exact;
    McMetric sop_lower;
    McMetric spsc;
};

struct McReport {
    /// gamma_eq = min(gamma_R, gamma_U)
    McMetrics min_form;
    /// gamma_eq = gamma_R gamma_U / (gamma_R + gamma_U + 1)
    McMetrics harmonic_form;
    std::string generator;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    unsigned batches = 0;
    Scenario scenario = Scenario::I;
    SamplingModel model = SamplingModel::Physical;
};

/// Batch-means estimates; batch k uses substream k of the seed and batches
/// are merged in index order.
McReport estimate_metrics(const ScenarioConfig& config);

/// 99% two-sided DKW band half-width for n samples.
double dkw_epsilon(std::size_t n, double confidence = 0.99);

/// sup_x |F_n(x) - F(x)| over the sorted sample (sorted in place).
template <class Cdf>
double ks_distance(std::vector<double>& sample, Cdf&& cdf);

}  // namespace rissec

#include <algorithm>
#include <cmath>

namespace rissec {

template <class Cdf>
double ks_distance(std::vector<double>& sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

}  // namespace rissec
