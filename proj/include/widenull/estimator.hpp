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

#include "widenull/scenario.hpp"

namespace widenull::estimator {

/// Where a null-space basis came from: a single bin or a bin cluster.
struct NullSpaceProvenance {
    enum class Kind { bin, cluster };
    Kind kind = Kind::bin;
    int index = 0;
};

/**
 * Orthonormal basis of the estimated transmit null space: an
 * M x (M - num_sources) matrix whose columns span the directions the base
 * station may use without interfering with the detected sources. May have
 * zero columns when num_sources == M.
 */
struct NullSpaceBasis {
    int num_antennas = 0;
    int num_sources = 0;
    Eigen::MatrixXcd columns;
    NullSpaceProvenance provenance;
};

/// Received-power statistics of one bin: mean = Tr(R_hat - sigma_w^2 I) and
/// the Gaussian model std sqrt((mean^2 + sigma_w^4) / T).
struct PowerStats {
    double mean = 0.0;
    double std_dev = 0.0;
    int snapshots = 0;
    double noise_var = 0.0;
};

/// Eigenvalues of R_hat - sigma_w^2 I, sorted descending (finite-sample
/// values may be negative).
Eigen::VectorXd signal_eigenvalues(const scenario::BinCovariance& cov);

/**
 * Wax-Kailath MDL source count over l in [1, M]:
 *   argmin (l-M) T log(g(l)/a(l)) + 0.5 l (2M-l) log T
 * with g/a the geometric/arithmetic means of the M-l smallest eigenvalues.
 * The criterion is evaluated on the noise-floor-restored values
 * d_j + noise_var (the eigenvalues of R_hat itself), clamped below at
 * 1e-12 * max(|trace|, 1); the first term is 0 at l = M and ties break
 * toward smaller l. eigs_desc must be the descending output of
 * signal_eigenvalues.
 */
int mdl_source_count(const Eigen::VectorXd& eigs_desc, int snapshots, int num_antennas,
                     double noise_var);

/// Minimum-power orthonormal basis: eigenvector columns L+1..M of
/// R_hat - sigma_w^2 I (eigenvalues descending).
NullSpaceBasis null_space(const scenario::BinCovariance& cov, int source_count);

PowerStats power_stats(const scenario::BinCovariance& cov);

/**
 * Clustering test statistic: Tr(U^H (R_hat - sigma_w^2 I) U), the residual
 * signal power of the bin inside the candidate null space. Tiny negative
 * rounding residue (|v| < 1e-12 |mu|) is flushed to zero.
 */
double test_statistic(const NullSpaceBasis& basis, const scenario::BinCovariance& cov);

/// Threshold gamma = delta0 * mean + delta0 * std * Phi^-1(p0), floored at 0:
/// a boundary-correlation bin passes the test with probability p0 under the
/// Gaussian model of the statistic.
double clustering_threshold(const PowerStats& stats, double delta0, double p0);

} // namespace widenull::estimator
