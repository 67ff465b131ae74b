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

#include "widenull/channel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "widenull/numerics.hpp"

namespace widenull::channel {

void PowerDelayProfile::validate() const {
    if (tap_delays_ns.empty() || tap_delays_ns.size() != tap_powers_db.size())
        throw std::invalid_argument("PowerDelayProfile: delay/power arrays must be non-empty and "
                                    "of equal length");
    if (tap_delays_ns.front() < 0.0)
        throw std::invalid_argument("PowerDelayProfile: tap delays must be non-negative");
    for (std::size_t i = 1; i < tap_delays_ns.size(); ++i)
        if (!(tap_delays_ns[i] > tap_delays_ns[i - 1]))
            throw std::invalid_argument("PowerDelayProfile: tap delays must be strictly ascending");
    if (!(sample_period_ns > 0.0))
        throw std::invalid_argument("PowerDelayProfile: sample period must be positive");
    double total = 0.0;
    for (double p_db : tap_powers_db) {
        if (!std::isfinite(p_db))
            throw std::invalid_argument("PowerDelayProfile: non-finite tap power");
        total += std::pow(10.0, p_db / 10.0);
    }
    if (!(total > 0.0))
        throw std::invalid_argument("PowerDelayProfile: total tap power must be positive");
}

std::vector<double> PowerDelayProfile::normalized_linear_powers() const {
    std::vector<double> lin(tap_powers_db.size());
    double total = 0.0;
    for (std::size_t i = 0; i < lin.size(); ++i) {
        lin[i] = std::pow(10.0, tap_powers_db[i] / 10.0);
        total += lin[i];
    }
    for (double& p : lin)
        p /= total;
    return lin;
}

std::vector<int> PowerDelayProfile::sample_indices() const {
    std::vector<int> idx(tap_delays_ns.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = static_cast<int>(std::lround(tap_delays_ns[i] / sample_period_ns));
    return idx;
}

double rms_delay_spread(const PowerDelayProfile& pdp) {
    pdp.validate();
    const std::vector<double> p = pdp.normalized_linear_powers();
    double mean = 0.0, second = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        mean += p[i] * pdp.tap_delays_ns[i];
        second += p[i] * pdp.tap_delays_ns[i] * pdp.tap_delays_ns[i];
    }
    return std::sqrt(std::max(second - mean * mean, 0.0));
}

ChannelRealization sample_taps(const PowerDelayProfile& pdp, int num_antennas, int num_ous,
                               int fft_size, RandomStream& rng) {
    pdp.validate();
    if (num_antennas < 1 || num_ous < 1 || fft_size < 1)
        throw std::invalid_argument("sample_taps: antenna, user and FFT counts must be >= 1");

    const std::vector<double> powers = pdp.normalized_linear_powers();
    const std::vector<int> indices = pdp.sample_indices();
    const int n_delay = 1 + *std::max_element(indices.begin(), indices.end());
    if (n_delay > fft_size)
        throw std::invalid_argument("sample_taps: channel longer than FFT support");

    ChannelRealization out;
    out.num_antennas = num_antennas;
    out.num_ous = num_ous;
    out.fft_size = fft_size;
    out.time_taps.resize(num_ous);

    // Draw order (user, antenna, tap) is part of the reproducibility contract.
    for (int l = 0; l < num_ous; ++l) {
        Eigen::MatrixXcd taps = Eigen::MatrixXcd::Zero(num_antennas, n_delay);
        for (int m = 0; m < num_antennas; ++m)
            for (std::size_t t = 0; t < indices.size(); ++t)
                taps(m, indices[t]) += std::sqrt(powers[t]) * rng.complex_normal();
        out.time_taps[l] = std::move(taps);
    }
    return out;
}

void frequency_response(ChannelRealization& realization) {
    if (realization.time_taps.empty())
        throw std::invalid_argument("frequency_response: no time taps present");
    const int fft_size = realization.fft_size;
    realization.freq_response.assign(realization.num_ous, Eigen::MatrixXcd());
    for (int l = 0; l < realization.num_ous; ++l) {
        const Eigen::MatrixXcd& taps = realization.time_taps[l];
        Eigen::MatrixXcd h(realization.num_antennas, fft_size);
        std::vector<std::complex<double>> row(taps.cols());
        for (int m = 0; m < realization.num_antennas; ++m) {
            for (Eigen::Index p = 0; p < taps.cols(); ++p)
                row[static_cast<std::size_t>(p)] = taps(m, p);
            for (int f = 0; f < fft_size; ++f)
                h(m, f) = numerics::dft_bin_response(row, fft_size, f);
        }
        realization.freq_response[l] = std::move(h);
    }
}

double channel_angle(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0))
        throw std::invalid_argument("channel_angle: zero vector");
    const double cosang = std::min(std::abs(a.dot(b)) / (na * nb), 1.0);
    return std::acos(cosang);
}

namespace {

struct CorrelationSums {
    std::vector<double> num;
    std::vector<double> den;
};

// Accumulates the joint numerator/denominator sums for one block of trials.
// Each trial draws one user's taps, evaluates the full bin response, and
// sweeps every anchor bin with wraparound.
CorrelationSums correlation_block(const PowerDelayProfile& pdp, std::span<const int> spacings,
                                  int num_antennas, int fft_size, const RandomStream& base,
                                  int trial_begin, int trial_end) {
    CorrelationSums sums;
    sums.num.assign(spacings.size(), 0.0);
    sums.den.assign(spacings.size(), 0.0);

    for (int t = trial_begin; t < trial_end; ++t) {
        RandomStream stream = base.child(static_cast<std::uint64_t>(t));
        ChannelRealization real = sample_taps(pdp, num_antennas, 1, fft_size, stream);
        frequency_response(real);
        const Eigen::MatrixXcd& h = real.freq_response[0];

        Eigen::VectorXd norms(fft_size);
        for (int f = 0; f < fft_size; ++f)
            norms[f] = h.col(f).squaredNorm();

        for (std::size_t s = 0; s < spacings.size(); ++s) {
            const int spacing = spacings[s];
            double num = 0.0, den = 0.0;
            for (int f = 0; f < fft_size; ++f) {
                const int g = (f + spacing) % fft_size;
                num += std::norm(h.col(f).dot(h.col(g)));
                den += norms[f] * norms[g];
            }
            sums.num[s] += num;
            sums.den[s] += den;
        }
    }
    return sums;
}

} // namespace

std::vector<double> correlation_curve(const PowerDelayProfile& pdp, std::span<const int> spacings,
                                      int num_antennas, int fft_size, int trials,
                                      const RandomStream& rng, int threads) {
    pdp.validate();
    if (trials < 1)
        throw std::invalid_argument("correlation_curve: trials must be >= 1");
    for (int spacing : spacings)
        if (spacing < 0 || spacing >= fft_size)
            throw std::invalid_argument("correlation_curve: spacing out of range");

    // Fixed chunking keeps the floating-point reduction order independent of
    // the thread count.
    const int chunks = std::min(trials, 64);
    std::vector<CorrelationSums> partial(static_cast<std::size_t>(chunks));
    const auto chunk_bounds = [&](int c) {
        const int lo = static_cast<int>(static_cast<long long>(trials) * c / chunks);
        const int hi = static_cast<int>(static_cast<long long>(trials) * (c + 1) / chunks);
        return std::pair<int, int>{lo, hi};
    };

    const int workers = std::max(1, std::min(threads, chunks));
    if (workers == 1) {
        for (int c = 0; c < chunks; ++c) {
            const auto [lo, hi] = chunk_bounds(c);
            partial[static_cast<std::size_t>(c)] =
                correlation_block(pdp, spacings, num_antennas, fft_size, rng, lo, hi);
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (int c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
                    const auto [lo, hi] = chunk_bounds(c);
                    partial[static_cast<std::size_t>(c)] =
                        correlation_block(pdp, spacings, num_antennas, fft_size, rng, lo, hi);
                }
            });
        }
        for (std::thread& th : pool)
            th.join();
    }

    std::vector<double> out(spacings.size());
    for (std::size_t s = 0; s < spacings.size(); ++s) {
        double num = 0.0, den = 0.0;
        for (int c = 0; c < chunks; ++c) {
            num += partial[static_cast<std::size_t>(c)].num[s];
            den += partial[static_cast<std::size_t>(c)].den[s];
        }
        out[s] = num / den;
    }
    return out;
}

double correlation_coefficient(const PowerDelayProfile& pdp, int spacing, int num_antennas,
                               int fft_size, int trials, RandomStream& rng) {
    const int spacings[1] = {spacing};
    return correlation_curve(pdp, spacings, num_antennas, fft_size, trials, rng, 1)[0];
}

std::vector<PowerDelayProfile> load_pdp_presets(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_pdp_presets: cannot open " + path);
    nlohmann::json doc = nlohmann::json::parse(in);

    std::vector<PowerDelayProfile> presets;
    for (const nlohmann::json& entry : doc.at("presets")) {
        PowerDelayProfile pdp;
        pdp.name = entry.at("name").get<std::string>();
        pdp.sample_period_ns = entry.at("sample_period_ns").get<double>();
        pdp.tap_delays_ns = entry.at("tap_delays_ns").get<std::vector<double>>();
        pdp.tap_powers_db = entry.at("tap_powers_db").get<std::vector<double>>();
        pdp.validate();
        presets.push_back(std::move(pdp));
    }
    return presets;
}

const PowerDelayProfile& find_preset(const std::vector<PowerDelayProfile>& presets,
                                     const std::string& name) {
    for (const PowerDelayProfile& pdp : presets)
        if (pdp.name == name)
            return pdp;
    throw std::runtime_error("find_preset: no preset named '" + name + "'");
}

} // namespace widenull::channel
