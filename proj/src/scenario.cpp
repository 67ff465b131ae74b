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

#include "widenull/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace widenull::scenario {

void ScenarioConfig::validate() const {
    if (num_antennas < 2)
        throw std::invalid_argument("ScenarioConfig: need at least 2 antennas");
    if (snapshots < 2)
        throw std::invalid_argument("ScenarioConfig: need at least 2 snapshots");
    if (!(noise_var > 0.0))
        throw std::invalid_argument("ScenarioConfig: noise variance must be positive");
    if (fft_size < 1)
        throw std::invalid_argument("ScenarioConfig: FFT size must be >= 1");
    if (!(p0 > 0.0 && p0 < 1.0))
        throw std::invalid_argument("ScenarioConfig: p0 must lie in (0, 1)");
    if (delta0.empty())
        throw std::invalid_argument("ScenarioConfig: at least one delta0 required");
    for (double d : delta0)
        if (!(d > 0.0 && d < 1.0))
            throw std::invalid_argument("ScenarioConfig: delta0 values must lie in (0, 1)");
    for (const OuConfig& ou : ous) {
        if (ou.occupied_lo < 0 || ou.occupied_lo > ou.occupied_hi || ou.occupied_hi >= fft_size)
            throw std::invalid_argument("ScenarioConfig: invalid occupied bin range");
        if (ou.mean_snr_linear < 0.0)
            throw std::invalid_argument("ScenarioConfig: mean SNR must be non-negative");
    }
}

namespace {

nlohmann::json to_json(const ScenarioConfig& c) {
    nlohmann::json j;
    j["num_antennas"] = c.num_antennas;
    j["fft_size"] = c.fft_size;
    j["snapshots"] = c.snapshots;
    j["noise_var"] = c.noise_var;
    j["p0"] = c.p0;
    j["delta0"] = c.delta0;
    j["seed"] = c.seed;
    j["snr_deterministic"] = c.snr_deterministic;
    j["pdp_preset"] = c.pdp_preset;
    j["pdp_preset_file"] = c.pdp_preset_file;
    nlohmann::json ous = nlohmann::json::array();
    for (const OuConfig& ou : c.ous) {
        nlohmann::json o;
        o["center_bin"] = ou.resolved_center();
        o["occupied_bins"] = {ou.occupied_lo, ou.occupied_hi};
        o["mean_snr_linear"] = ou.mean_snr_linear;
        ous.push_back(o);
    }
    j["ous"] = ous;
    return j;
}

} // namespace

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_scenario_config: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);

    ScenarioConfig c;
    c.num_antennas = j.at("num_antennas").get<int>();
    c.fft_size = j.at("fft_size").get<int>();
    c.snapshots = j.at("snapshots").get<int>();
    c.noise_var = j.at("noise_var").get<double>();
    c.p0 = j.at("p0").get<double>();
    if (j.at("delta0").is_array())
        c.delta0 = j.at("delta0").get<std::vector<double>>();
    else
        c.delta0 = {j.at("delta0").get<double>()};
    if (j.contains("seed"))
        c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("snr_deterministic"))
        c.snr_deterministic = j.at("snr_deterministic").get<bool>();
    c.pdp_preset = j.at("pdp_preset").get<std::string>();
    if (j.contains("pdp_preset_file"))
        c.pdp_preset_file = j.at("pdp_preset_file").get<std::string>();

    for (const nlohmann::json& o : j.at("ous")) {
        OuConfig ou;
        ou.occupied_lo = o.at("occupied_bins").at(0).get<int>();
        ou.occupied_hi = o.at("occupied_bins").at(1).get<int>();
        if (o.contains("center_bin"))
            ou.center_bin = o.at("center_bin").get<int>();
        if (o.contains("mean_snr_linear"))
            ou.mean_snr_linear = o.at("mean_snr_linear").get<double>();
        c.ous.push_back(ou);
    }

    // Resolve a relative preset path against the config's own directory.
    const std::filesystem::path preset(c.pdp_preset_file);
    if (preset.is_relative()) {
        const std::filesystem::path base = std::filesystem::path(path).parent_path();
        const std::filesystem::path resolved = base / preset;
        if (std::filesystem::exists(resolved))
            c.pdp_preset_file = resolved.string();
    }

    c.validate();
    return c;
}

std::string config_fingerprint(const ScenarioConfig& config) {
    const std::string canon = to_json(config).dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

int ActiveBins::index_of(int bin) const {
    const auto it = std::lower_bound(bins.begin(), bins.end(), bin);
    if (it == bins.end() || *it != bin)
        return -1;
    return static_cast<int>(it - bins.begin());
}

ActiveBins active_bins(const std::vector<OuConfig>& ous, int fft_size) {
    std::vector<std::vector<int>> at_bin(static_cast<std::size_t>(fft_size));
    for (std::size_t l = 0; l < ous.size(); ++l) {
        if (ous[l].occupied_lo < 0 || ous[l].occupied_hi >= fft_size ||
            ous[l].occupied_lo > ous[l].occupied_hi)
            throw std::invalid_argument("active_bins: invalid occupied bin range");
        for (int f = ous[l].occupied_lo; f <= ous[l].occupied_hi; ++f)
            at_bin[static_cast<std::size_t>(f)].push_back(static_cast<int>(l));
    }
    ActiveBins out;
    for (int f = 0; f < fft_size; ++f) {
        if (!at_bin[static_cast<std::size_t>(f)].empty()) {
            out.bins.push_back(f);
            out.sources.push_back(std::move(at_bin[static_cast<std::size_t>(f)]));
        }
    }
    return out;
}

std::vector<double> draw_powers(const std::vector<OuConfig>& ous,
                                const channel::ChannelRealization& channels, double noise_var,
                                bool deterministic, RandomStream& rng) {
    if (channels.freq_response.empty())
        throw std::invalid_argument("draw_powers: channel frequency responses not filled");
    const int num_antennas = channels.num_antennas;

    std::vector<double> powers(ous.size(), 0.0);
    for (std::size_t l = 0; l < ous.size(); ++l) {
        const OuConfig& ou = ous[l];
        const double snr = deterministic ? ou.mean_snr_linear : rng.exponential(ou.mean_snr_linear);
        double band_norm2 = 0.0;
        for (int f = ou.occupied_lo; f <= ou.occupied_hi; ++f)
            band_norm2 += channels.freq_response[l].col(f).squaredNorm();
        if (!(band_norm2 > 0.0)) {
            powers[l] = 0.0;
            continue;
        }
        const int num_bins = ou.occupied_hi - ou.occupied_lo + 1;
        powers[l] = snr * noise_var * num_antennas * num_bins / band_norm2;
    }
    return powers;
}

SnapshotSet synthesize_snapshots(const ScenarioConfig& config, const ActiveBins& active,
                                 const channel::ChannelRealization& channels,
                                 std::span<const double> powers, RandomStream& rng) {
    const int num_antennas = config.num_antennas;
    const int num_snapshots = config.snapshots;
    const double noise_std = std::sqrt(config.noise_var);

    SnapshotSet out;
    out.bins = active.bins;
    out.snapshots.reserve(active.size());

    // Draw order: bins ascending, snapshots in time order; per snapshot the
    // active users' symbols (ascending index), then the noise vector.
    for (std::size_t i = 0; i < active.size(); ++i) {
        const int bin = active.bins[i];
        const std::vector<int>& srcs = active.sources[i];
        Eigen::MatrixXcd r(num_antennas, num_snapshots);
        for (int n = 0; n < num_snapshots; ++n) {
            Eigen::VectorXcd col = Eigen::VectorXcd::Zero(num_antennas);
            for (int l : srcs) {
                const std::complex<double> symbol = rng.complex_normal();
                const double amp = std::sqrt(powers[static_cast<std::size_t>(l)]);
                col += amp * symbol * channels.freq_response[static_cast<std::size_t>(l)].col(bin);
            }
            for (int m = 0; m < num_antennas; ++m)
                col[m] += noise_std * rng.complex_normal();
            r.col(n) = col;
        }
        out.snapshots.push_back(std::move(r));
    }
    return out;
}

BinCovariance estimate_covariance(int bin, const Eigen::MatrixXcd& snapshots, double noise_var) {
    if (snapshots.cols() < 1)
        throw std::invalid_argument("estimate_covariance: no snapshots");
    BinCovariance cov;
    cov.bin = bin;
    cov.noise_var = noise_var;
    cov.snapshots = static_cast<int>(snapshots.cols());
    cov.sample_cov =
        (snapshots * snapshots.adjoint()) / static_cast<double>(snapshots.cols());
    // Exact Hermitian symmetry despite rounding in the rank-T product.
    cov.sample_cov = 0.5 * (cov.sample_cov + cov.sample_cov.adjoint()).eval();
    return cov;
}

Eigen::MatrixXcd asymptotic_covariance(const ScenarioConfig& config, const ActiveBins& active,
                                       const channel::ChannelRealization& channels,
                                       std::span<const double> powers, int bin) {
    const int idx = active.index_of(bin);
    if (idx < 0)
        throw std::invalid_argument("asymptotic_covariance: bin is not active");
    Eigen::MatrixXcd r = config.noise_var *
                         Eigen::MatrixXcd::Identity(config.num_antennas, config.num_antennas);
    for (int l : active.sources[static_cast<std::size_t>(idx)]) {
        const Eigen::VectorXcd h = channels.freq_response[static_cast<std::size_t>(l)].col(bin);
        r += powers[static_cast<std::size_t>(l)] * (h * h.adjoint());
    }
    return r;
}

} // namespace widenull::scenario
