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

#include <set>
#include <span>
#include <vector>

#include "widenull/estimator.hpp"
#include "widenull/scenario.hpp"

namespace widenull::clustering {

/// Covariance lookup by bin index over a dense active-bin set.
class CovarianceTable {
  public:
    CovarianceTable() = default;
    explicit CovarianceTable(std::vector<scenario::BinCovariance> covariances);

    bool contains(int bin) const;
    const scenario::BinCovariance& at(int bin) const;
    const std::vector<scenario::BinCovariance>& all() const { return covariances_; }

  private:
    std::vector<scenario::BinCovariance> covariances_; // sorted by bin
};

/// One frequency cluster: a contiguous member range around its center bin,
/// the source count estimated at the center, and the shared basis.
struct Cluster {
    int center_bin = 0;
    std::vector<int> members; // sorted, contiguous
    int source_count = 0;
    estimator::NullSpaceBasis basis;
};

/// Clustering outcome with instrumented complexity counters. evd_count
/// tallies actual eigendecompositions (2 per multi-bin cluster, 1 per
/// singleton); the two closed-form accessors expose both published
/// accountings for diagnostics.
struct ClusterSet {
    std::vector<Cluster> clusters;
    int evd_count = 0;
    int matrices_count = 0;
    int singleton_count = 0;
    int excluded_members = 0; // noise-dominated bins dropped from cluster sums

    int evd_formula_per_cluster_plus_singletons() const {
        return static_cast<int>(clusters.size()) + singleton_count;
    }
    int evd_formula_two_per_cluster() const {
        return 2 * static_cast<int>(clusters.size()) - singleton_count;
    }
};

/// Floor of the arithmetic mean of a non-empty contiguous band.
int band_center(std::span<const int> band);

/**
 * Grows a cluster outward from the center bin: candidates at +1 steps, then
 * -1 steps, are added while they remain in the available set and their test
 * statistic against the center basis stays within the per-bin threshold;
 * each direction stops permanently at its first failure. The center is
 * always a member.
 */
std::vector<int> grow_cluster(int center_bin, const estimator::NullSpaceBasis& center_basis,
                              const CovarianceTable& covariances, const std::set<int>& available,
                              double delta0, double p0);

/**
 * Common null space of a cluster from the normalized covariance sum
 *   R = sum_f (1/mu_f) (R_hat^f - sigma_w^2 I),
 * each term weighted by its own bin's received power so every member counts
 * equally. Members with mu_f <= 0 are excluded from the sum (noise-dominated
 * bin) and tallied in excluded_count when provided; when all members are
 * excluded the unnormalized sum is used instead. Basis width is
 * M - source_count with source_count taken at the cluster center.
 */
estimator::NullSpaceBasis common_null_space(std::span<const int> members,
                                            const CovarianceTable& covariances, int source_count,
                                            int* excluded_count = nullptr);

/**
 * Full clustering pass over the active bins: repeatedly takes the first
 * contiguous band of unclustered bins, decomposes the covariance at its
 * center (source count + center basis, one EVD), grows the cluster, and
 * computes the shared basis from the normalized sum (second EVD, skipped
 * for singletons which reuse the center basis). Clusters partition the
 * active set exactly.
 */
ClusterSet cluster_bins(std::span<const int> active_bins, const CovarianceTable& covariances,
                        double delta0, double p0);

} // namespace widenull::clustering
