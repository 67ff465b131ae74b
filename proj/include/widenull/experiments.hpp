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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "widenull/clustering.hpp"
#include "widenull/estimator.hpp"
#include "widenull/scenario.hpp"

namespace widenull::experiments {

/// Relative null quality 20 log10(|U^H h| / |h|) in dB, floored at -200 when
/// the ratio underflows. More negative is better; never positive.
double null_quality_db(const estimator::NullSpaceBasis& basis, const Eigen::VectorXcd& h);

/// Per-bin baseline: an independent source count + null basis at every
/// active bin, one EVD each.
struct BruteForceResult {
    std::vector<estimator::NullSpaceBasis> bases; // parallel to the bin list
    int evd_count = 0;
    int matrices_count = 0;
};

BruteForceResult brute_force_null_spaces(std::span<const int> bins,
                                         const clustering::CovarianceTable& covariances);

/// Whether a trial estimates covariances from synthesized snapshots or uses
/// the exact asymptotic covariances (oracle mode).
enum class CovarianceMode { sample, asymptotic };

struct ClusterCounters {
    int clusters = 0;
    int evd = 0;
    int matrices = 0;
    int singletons = 0;
};

/// One channel realization end to end: qualities are evaluated against the
/// realization's true channel vectors, per active (bin, user) pair, for the
/// brute-force baseline and for the clustered method at each delta0.
struct TrialResult {
    std::vector<std::pair<int, int>> pairs; // (bin, user), bins ascending
    std::vector<double> brute_quality_db;
    std::vector<std::vector<double>> clustered_quality_db; // [delta0][pair]
    int brute_evd_count = 0;
    int brute_matrices_count = 0;
    std::vector<ClusterCounters> cluster_counters; // per delta0
    std::uint64_t seed = 0;
};

TrialResult run_trial(const scenario::ScenarioConfig& config, RandomStream& rng,
                      CovarianceMode mode = CovarianceMode::sample);

/// Aggregates over a trial batch: mean of dB values per pair and counter
/// statistics (sample std over trials). Failed trials are excluded and
/// counted.
struct AggregateResult {
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> brute_mean_q_db;
    std::vector<std::vector<double>> clustered_mean_q_db; // [delta0][pair]
    double brute_mean_evd = 0.0;
    struct CounterStats {
        double mean_clusters = 0.0, std_clusters = 0.0;
        double mean_evd = 0.0, std_evd = 0.0;
        double mean_matrices = 0.0, std_matrices = 0.0;
    };
    std::vector<CounterStats> per_delta0;
    int trials = 0;
    int failed_trials = 0;
    std::string fingerprint;
};

/**
 * Runs `trials` independent trials with per-trial streams derived from the
 * config seed by trial index, then folds results in trial order. threads
 * affects speed only; serial and parallel runs are bit-identical.
 */
AggregateResult run_monte_carlo(const scenario::ScenarioConfig& config, int trials,
                                int threads = 1, CovarianceMode mode = CovarianceMode::sample);

struct CorrelationRow {
    std::string model;
    double rms_delay_spread_ns = 0.0;
    int spacing_bins = 0;
    double c = 0.0;
};

/// Correlation table over models and spacings, rows sorted by model (input
/// order) then spacing.
std::vector<CorrelationRow>
reproduce_correlation_curves(const std::vector<channel::PowerDelayProfile>& presets,
                             std::span<const int> spacings, int num_antennas, int fft_size,
                             int trials, std::uint64_t seed, int threads = 1);

// --- CLI entry points (shared by the binary and the test suites) ---

struct SimulateOptions {
    std::string config_path;
    int trials = 100;
    std::vector<double> delta0; // empty: use config values
    std::string out_dir;
    std::uint64_t seed = 0; // 0: use config seed
    int threads = 1;
};

/// Runs the simulate pipeline and writes quality.csv + complexity.csv.
int run_simulate_command(const SimulateOptions& options);

struct CorrelationOptions {
    std::string config_path;
    std::vector<int> spacings; // default 0..50
    int trials = 10000;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Runs the correlation sweep over every preset and writes correlation.csv.
int run_correlation_command(const CorrelationOptions& options);

/// Asymptotic-covariance sanity pipeline; prints one pass/fail line per
/// invariant and returns the number of failures.
int run_oracle_command(const std::string& config_path, std::uint64_t seed_override,
                       std::ostream& out);

/// Parses "a..b" ranges and comma lists ("0..50", "0,5,10", "0..8,16").
std::vector<int> parse_spacings(const std::string& text);

} // namespace widenull::experiments
