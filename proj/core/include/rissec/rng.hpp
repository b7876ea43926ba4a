// SPDX-License-Identifier: Apache-2.0
//
// Reproducible random streams. The engine and the seed_seq mixing are fully
// specified by the C++ standard; the std distributions are not, so the
// variate transforms live here.
#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace rissec {

class RandomStream {
public:
    /// Substream `stream` of master seed `seed`. Distinct (seed, stream) pairs
    /// give statistically independent sequences.
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    double normal();
    double exponential();
    /// Gamma(shape, 1) for any shape > 0.
    double gamma(double shape);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    std::uint64_t stream_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Name recorded in every report that consumes random numbers.
std::string generator_name();

}  // namespace rissec
