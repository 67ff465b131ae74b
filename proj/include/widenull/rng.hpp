// widenull - wideband transmit null-space estimation library and simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace widenull {

/**
 * Seeded random stream with hand-rolled transforms.
 *
 * All distributions are derived from the raw mt19937_64 output so that a
 * given seed produces the same draw sequence on every platform (the
 * std::*_distribution classes are implementation-defined). Child streams
 * are derived from the original seed, not the current state, so splitting
 * is independent of how much the parent has been consumed.
 */
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (one pair per call, sine half discarded).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * pi() * u2);
    }

    /// Circular complex Gaussian with E|z|^2 = 1 (variance 1/2 per component).
    std::complex<double> complex_normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log1p(-u1));
        return {r * std::cos(2.0 * pi() * u2), r * std::sin(2.0 * pi() * u2)};
    }

    /// Exponential with the given mean (mean 0 yields the degenerate draw 0).
    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    /// Independent stream derived from (seed, index).
    RandomStream child(std::uint64_t index) const {
        return RandomStream(splitmix64(seed_ ^ ((index + 1) * 0x9E3779B97F4A7C15ULL)));
    }

  private:
    static constexpr double pi() { return 3.14159265358979323846; }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

} // namespace widenull
