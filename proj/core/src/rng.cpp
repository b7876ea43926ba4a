// SPDX-License-Identifier: Apache-2.0
#include "rissec/rng.hpp"

#include "rissec/errors.hpp"

#include <cmath>

namespace rissec {
namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
    // The trailing word salts the sequence so (seed, stream) never collides
    // with a plain two-word seeding elsewhere.
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x72697373u};
    return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(seeded_engine(seed, stream)), seed_(seed), stream_(stream) {}

double RandomStream::uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double RandomStream::exponential() { return -std::log(uniform()); }

double RandomStream::gamma(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) throw DomainError("RandomStream::gamma: shape must be positive");
    if (shape < 1.0) {
        // G(a) = G(a + 1) U^{1/a}, kept in logs so tiny shapes do not underflow early.
        const double g = gamma(shape + 1.0);
        return std::exp(std::log(g) + std::log(uniform()) / shape);
    }
    // Marsaglia & Tsang squeeze-rejection.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::string generator_name() { return "mt19937_64/seed_seq(seed,stream)"; }

}  // namespace rissec
