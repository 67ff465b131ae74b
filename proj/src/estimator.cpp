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

#include "widenull/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "widenull/numerics.hpp"

namespace widenull::estimator {

Eigen::VectorXd signal_eigenvalues(const scenario::BinCovariance& cov) {
    const Eigen::MatrixXcd shifted =
        cov.sample_cov -
        cov.noise_var * Eigen::MatrixXcd::Identity(cov.sample_cov.rows(), cov.sample_cov.cols());
    return numerics::hermitian_evd(shifted).eigenvalues;
}

int mdl_source_count(const Eigen::VectorXd& eigs_desc, int snapshots, int num_antennas,
                     double noise_var) {
    const int m = num_antennas;
    if (eigs_desc.size() != m)
        throw std::invalid_argument("mdl_source_count: eigenvalue array must have length M");
    if (snapshots < 2)
        throw std::invalid_argument("mdl_source_count: need at least 2 snapshots");
    if (!eigs_desc.allFinite())
        throw std::invalid_argument("mdl_source_count: non-finite eigenvalues");

    // Restore the known noise floor before taking means: the description
    // length compares the spread of the noise eigenvalues of R_hat, which
    // sit near noise_var, not near zero.
    Eigen::VectorXd d = eigs_desc.array() + noise_var;
    const double eps = 1e-12 * std::max(std::abs(d.sum()), 1.0);
    for (int i = 0; i < m; ++i)
        d[i] = std::max(d[i], eps);

    const double log_t = std::log(static_cast<double>(snapshots));
    int best_l = 1;
    double best = 0.0;
    for (int l = 1; l <= m; ++l) {
        double first = 0.0;
        if (l < m) {
            double log_sum = 0.0, sum = 0.0;
            for (int j = l; j < m; ++j) {
                log_sum += std::log(d[j]);
                sum += d[j];
            }
            const double k = static_cast<double>(m - l);
            const double log_g = log_sum / k;
            const double log_a = std::log(sum / k);
            first = (l - m) * static_cast<double>(snapshots) * (log_g - log_a);
        }
        const double criterion = first + 0.5 * l * (2.0 * m - l) * log_t;
        if (l == 1 || criterion < best) {
            best = criterion;
            best_l = l;
        }
    }
    return best_l;
}

NullSpaceBasis null_space(const scenario::BinCovariance& cov, int source_count) {
    const int m = static_cast<int>(cov.sample_cov.rows());
    if (source_count < 0 || source_count > m)
        throw std::invalid_argument("null_space: source count must lie in [0, M]");

    const Eigen::MatrixXcd shifted =
        cov.sample_cov - cov.noise_var * Eigen::MatrixXcd::Identity(m, m);
    const numerics::EigenDecomposition evd = numerics::hermitian_evd(shifted);

    NullSpaceBasis basis;
    basis.num_antennas = m;
    basis.num_sources = source_count;
    basis.columns = evd.eigenvectors.rightCols(m - source_count);
    basis.provenance = {NullSpaceProvenance::Kind::bin, cov.bin};
    return basis;
}

PowerStats power_stats(const scenario::BinCovariance& cov) {
    PowerStats stats;
    stats.snapshots = cov.snapshots;
    stats.noise_var = cov.noise_var;
    stats.mean = cov.sample_cov.trace().real() -
                 cov.noise_var * static_cast<double>(cov.sample_cov.rows());
    stats.std_dev = std::sqrt((stats.mean * stats.mean + cov.noise_var * cov.noise_var) /
                              static_cast<double>(cov.snapshots));
    return stats;
}

double test_statistic(const NullSpaceBasis& basis, const scenario::BinCovariance& cov) {
    if (basis.num_antennas != cov.sample_cov.rows())
        throw std::invalid_argument("test_statistic: basis/covariance dimension mismatch");
    if (basis.columns.cols() == 0)
        return 0.0;

    const Eigen::MatrixXcd shifted =
        cov.sample_cov -
        cov.noise_var * Eigen::MatrixXcd::Identity(cov.sample_cov.rows(), cov.sample_cov.cols());
    double value = (basis.columns.adjoint() * shifted * basis.columns).trace().real();

    const double mu = cov.sample_cov.trace().real() -
                      cov.noise_var * static_cast<double>(cov.sample_cov.rows());
    if (std::abs(value) < 1e-12 * std::abs(mu))
        value = 0.0;
    return value;
}

double clustering_threshold(const PowerStats& stats, double delta0, double p0) {
    if (!(delta0 > 0.0 && delta0 < 1.0))
        throw std::invalid_argument("clustering_threshold: delta0 must lie in (0, 1)");
    if (!(p0 > 0.0 && p0 < 1.0))
        throw std::invalid_argument("clustering_threshold: p0 must lie in (0, 1)");
    const double gamma =
        delta0 * stats.mean + delta0 * stats.std_dev * numerics::normal_quantile(p0);
    return std::max(gamma, 0.0);
}

} // namespace widenull::estimator
