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

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "widenull/rng.hpp"

namespace widenull::channel {

/**
 * Tapped-delay-line channel model: tap delays in nanoseconds (strictly
 * ascending, first >= 0) with average powers in dB. sample_period_ns is the
 * receiver sampling period T_s. Linear tap powers are normalized to unit
 * total power before use, so the link budget is controlled entirely by the
 * per-user power scale.
 */
struct PowerDelayProfile {
    std::string name;
    std::vector<double> tap_delays_ns;
    std::vector<double> tap_powers_db;
    double sample_period_ns = 0.0;

    /// Throws std::invalid_argument when any invariant is violated.
    void validate() const;

    /// Linear tap powers scaled to sum to 1.
    std::vector<double> normalized_linear_powers() const;

    /// Nearest-integer sample index for each tap (delay / T_s rounded).
    std::vector<int> sample_indices() const;
};

/// RMS delay spread in nanoseconds. Invariant under uniform power scaling.
double rms_delay_spread(const PowerDelayProfile& pdp);

/**
 * One fading draw: per-user, per-antenna time-domain taps on the sample
 * grid plus the derived per-bin frequency responses.
 */
struct ChannelRealization {
    int num_antennas = 0;
    int num_ous = 0;
    int fft_size = 0;
    /// Per user: num_antennas x n_delay matrix of sample-aligned taps.
    std::vector<Eigen::MatrixXcd> time_taps;
    /// Per user: num_antennas x fft_size matrix; column f is the channel
    /// vector at bin f. Empty until frequency_response() fills it.
    std::vector<Eigen::MatrixXcd> freq_response;
};

/**
 * Draws independent Rayleigh taps: each profile tap is a circular complex
 * Gaussian with variance equal to its normalized linear power, independent
 * across antennas, users and delays. Taps whose delays round to the same
 * sample index are summed coherently. Throws when a rounded index reaches
 * fft_size (channel longer than the FFT support).
 */
ChannelRealization sample_taps(const PowerDelayProfile& pdp, int num_antennas, int num_ous,
                               int fft_size, RandomStream& rng);

/// Fills freq_response from time_taps via the per-bin DFT response.
void frequency_response(ChannelRealization& realization);

/// Principal angle between two nonzero complex vectors:
/// arccos(|a^H b| / (|a| |b|)), in [0, pi/2].
double channel_angle(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/**
 * Monte Carlo estimate of the inter-bin channel correlation at the given
 * spacing: the expectations of |h_i^H h_j|^2 and |h_i|^2 |h_j|^2 are
 * accumulated jointly over realizations and over all fft_size anchor bins
 * (wraparound), and the ratio is returned. Equals 1 at spacing 0 and stays
 * in [0, 1]. Deterministic for a fixed stream.
 */
double correlation_coefficient(const PowerDelayProfile& pdp, int spacing, int num_antennas,
                               int fft_size, int trials, RandomStream& rng);

/**
 * Batched correlation over several spacings sharing one set of channel
 * realizations (common random numbers keep the estimated curve smooth).
 * threads affects speed only, never the result.
 */
std::vector<double> correlation_curve(const PowerDelayProfile& pdp, std::span<const int> spacings,
                                      int num_antennas, int fft_size, int trials,
                                      const RandomStream& rng, int threads = 1);

/// Loads the preset file (JSON: {"presets": [...]}) and validates each entry.
std::vector<PowerDelayProfile> load_pdp_presets(const std::string& path);

/// Preset lookup by name; throws when absent.
const PowerDelayProfile& find_preset(const std::vector<PowerDelayProfile>& presets,
                                     const std::string& name);

} // namespace widenull::channel
