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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "widenull/channel.hpp"
#include "widenull/rng.hpp"

namespace widenull::scenario {

/// One outside user: a contiguous occupied bin range and the mean of its
/// random received-SNR draw (linear scale).
struct OuConfig {
    int center_bin = -1; // derived as floor((lo+hi)/2) when negative
    int occupied_lo = 0;
    int occupied_hi = 0;
    double mean_snr_linear = 10.0;

    int resolved_center() const {
        return center_bin >= 0 ? center_bin : (occupied_lo + occupied_hi) / 2;
    }
};

/// Full simulation scenario. delta0 holds the clustering design points the
/// experiment sweeps; snr_deterministic switches the per-user SNR draw to
/// its mean (zero-variance mode).
struct ScenarioConfig {
    int num_antennas = 8;  // M
    int fft_size = 512;    // F
    int snapshots = 100;   // T
    double noise_var = 1.0;
    std::vector<OuConfig> ous;
    std::vector<double> delta0{0.01, 0.05, 0.1};
    double p0 = 0.95;
    std::uint64_t seed = 1;
    bool snr_deterministic = false;
    std::string pdp_preset = "EPA";
    std::string pdp_preset_file = "data/pdp_presets.json";

    void validate() const;
};

/// Loads a JSON scenario file; a relative pdp_preset_file is resolved
/// against the config file's directory.
ScenarioConfig load_scenario_config(const std::string& path);

/// Stable 64-bit FNV-1a fingerprint of the canonical config serialization.
std::string config_fingerprint(const ScenarioConfig& config);

/// Active bin set: sorted union of occupied ranges plus, per bin, the list
/// of users active there.
struct ActiveBins {
    std::vector<int> bins;
    std::vector<std::vector<int>> sources; // parallel to bins

    std::size_t size() const { return bins.size(); }
    /// Index into bins/sources, or -1 when the bin is not active.
    int index_of(int bin) const;
};

ActiveBins active_bins(const std::vector<OuConfig>& ous, int fft_size);

/// Sample covariance at one bin together with the known noise floor.
struct BinCovariance {
    int bin = 0;
    Eigen::MatrixXcd sample_cov;
    double noise_var = 0.0;
    int snapshots = 0;
};

/**
 * Per-user transmit power scale, constant across each user's occupied band.
 * The scale is set so that the realized band-averaged received SNR
 *   (1/|bins|) sum_f p |h^f|^2 / (M sigma_w^2)
 * equals the user's SNR draw exactly (an exponential with the configured
 * mean, or the mean itself in deterministic mode).
 */
std::vector<double> draw_powers(const std::vector<OuConfig>& ous,
                                const channel::ChannelRealization& channels, double noise_var,
                                bool deterministic, RandomStream& rng);

/// Snapshot matrices (num_antennas x snapshots), one per active bin.
struct SnapshotSet {
    std::vector<int> bins;
    std::vector<Eigen::MatrixXcd> snapshots; // parallel to bins
};

/**
 * Synthesizes r^f(n) = sum_l sqrt(p_l) x_l(n) h^f_l + w(n) for every active
 * bin: unit-power circular complex Gaussian symbols, independent across
 * bins, users and snapshots, plus white noise of variance noise_var per
 * antenna. Bit-reproducible for a fixed stream.
 */
SnapshotSet synthesize_snapshots(const ScenarioConfig& config, const ActiveBins& active,
                                 const channel::ChannelRealization& channels,
                                 std::span<const double> powers, RandomStream& rng);

/// Exact sample average of snapshot outer products.
BinCovariance estimate_covariance(int bin, const Eigen::MatrixXcd& snapshots, double noise_var);

/// True covariance sum_l p_l h^f_l (h^f_l)^H + noise_var I at an active bin;
/// throws when the bin is not active.
Eigen::MatrixXcd asymptotic_covariance(const ScenarioConfig& config, const ActiveBins& active,
                                       const channel::ChannelRealization& channels,
                                       std::span<const double> powers, int bin);

} // namespace widenull::scenario
