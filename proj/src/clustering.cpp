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

#include "widenull/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "widenull/numerics.hpp"

namespace widenull::clustering {

CovarianceTable::CovarianceTable(std::vector<scenario::BinCovariance> covariances)
    : covariances_(std::move(covariances)) {
    std::sort(covariances_.begin(), covariances_.end(),
              [](const scenario::BinCovariance& a, const scenario::BinCovariance& b) {
                  return a.bin < b.bin;
              });
    for (std::size_t i = 1; i < covariances_.size(); ++i)
        if (covariances_[i].bin == covariances_[i - 1].bin)
            throw std::invalid_argument("CovarianceTable: duplicate bin");
}

bool CovarianceTable::contains(int bin) const {
    const auto it = std::lower_bound(
        covariances_.begin(), covariances_.end(), bin,
        [](const scenario::BinCovariance& c, int b) { return c.bin < b; });
    return it != covariances_.end() && it->bin == bin;
}

const scenario::BinCovariance& CovarianceTable::at(int bin) const {
    const auto it = std::lower_bound(
        covariances_.begin(), covariances_.end(), bin,
        [](const scenario::BinCovariance& c, int b) { return c.bin < b; });
    if (it == covariances_.end() || it->bin != bin)
        throw std::out_of_range("CovarianceTable: no covariance at requested bin");
    return *it;
}

int band_center(std::span<const int> band) {
    if (band.empty())
        throw std::invalid_argument("band_center: empty band");
    long long sum = 0;
    for (int b : band)
        sum += b;
    // Members are non-negative bin indices, so integer division is the floor.
    return static_cast<int>(sum / static_cast<long long>(band.size()));
}

std::vector<int> grow_cluster(int center_bin, const estimator::NullSpaceBasis& center_basis,
                              const CovarianceTable& covariances, const std::set<int>& available,
                              double delta0, double p0) {
    if (available.find(center_bin) == available.end())
        throw std::invalid_argument("grow_cluster: center bin is not available");

    std::vector<int> members{center_bin};
    for (const int step : {+1, -1}) {
        int candidate = center_bin + step;
        while (available.find(candidate) != available.end()) {
            const scenario::BinCovariance& cov = covariances.at(candidate);
            const double gamma =
                estimator::clustering_threshold(estimator::power_stats(cov), delta0, p0);
            if (estimator::test_statistic(center_basis, cov) > gamma)
                break;
            members.push_back(candidate);
            candidate += step;
        }
    }
    std::sort(members.begin(), members.end());
    return members;
}

estimator::NullSpaceBasis common_null_space(std::span<const int> members,
                                            const CovarianceTable& covariances, int source_count,
                                            int* excluded_count) {
    if (members.empty())
        throw std::invalid_argument("common_null_space: empty member set");

    const scenario::BinCovariance& first = covariances.at(members[0]);
    const int m = static_cast<int>(first.sample_cov.rows());
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(m, m);

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(m, m);
    int used = 0;
    for (int bin : members) {
        const scenario::BinCovariance& cov = covariances.at(bin);
        const double mu = cov.sample_cov.trace().real() - cov.noise_var * m;
        if (mu > 0.0) {
            sum += (cov.sample_cov - cov.noise_var * identity) / mu;
            ++used;
        } else if (excluded_count != nullptr) {
            ++*excluded_count;
        }
    }
    if (used == 0) {
        // Every member is noise-dominated; fall back to the unnormalized sum.
        for (int bin : members) {
            const scenario::BinCovariance& cov = covariances.at(bin);
            sum += cov.sample_cov - cov.noise_var * identity;
        }
    }

    const numerics::EigenDecomposition evd = numerics::hermitian_evd(sum);
    estimator::NullSpaceBasis basis;
    basis.num_antennas = m;
    basis.num_sources = source_count;
    basis.columns = evd.eigenvectors.rightCols(m - source_count);
    basis.provenance = {estimator::NullSpaceProvenance::Kind::cluster, members[0]};
    return basis;
}

ClusterSet cluster_bins(std::span<const int> active_bins, const CovarianceTable& covariances,
                        double delta0, double p0) {
    std::set<int> available(active_bins.begin(), active_bins.end());

    ClusterSet out;
    int cluster_id = 0;
    while (!available.empty()) {
        // First contiguous band of what remains.
        std::vector<int> band;
        int bin = *available.begin();
        while (available.find(bin) != available.end()) {
            band.push_back(bin);
            ++bin;
        }

        const int center = band_center(band);
        const scenario::BinCovariance& center_cov = covariances.at(center);

        // One decomposition yields both the source count and the center basis.
        const Eigen::MatrixXcd shifted =
            center_cov.sample_cov -
            center_cov.noise_var *
                Eigen::MatrixXcd::Identity(center_cov.sample_cov.rows(),
                                           center_cov.sample_cov.cols());
        const numerics::EigenDecomposition evd = numerics::hermitian_evd(shifted);
        ++out.evd_count;

        const int m = static_cast<int>(center_cov.sample_cov.rows());
        const int source_count = estimator::mdl_source_count(
            evd.eigenvalues, center_cov.snapshots, m, center_cov.noise_var);

        estimator::NullSpaceBasis center_basis;
        center_basis.num_antennas = m;
        center_basis.num_sources = source_count;
        center_basis.columns = evd.eigenvectors.rightCols(m - source_count);
        center_basis.provenance = {estimator::NullSpaceProvenance::Kind::bin, center};

        Cluster cluster;
        cluster.center_bin = center;
        cluster.members = grow_cluster(center, center_basis, covariances, available, delta0, p0);
        cluster.source_count = source_count;

        if (cluster.members.size() > 1) {
            cluster.basis = common_null_space(cluster.members, covariances, source_count,
                                              &out.excluded_members);
            cluster.basis.provenance = {estimator::NullSpaceProvenance::Kind::cluster, cluster_id};
            ++out.evd_count;
        } else {
            cluster.basis = center_basis;
            cluster.basis.provenance = {estimator::NullSpaceProvenance::Kind::cluster, cluster_id};
            ++out.singleton_count;
        }

        for (int member : cluster.members)
            available.erase(member);
        out.clusters.push_back(std::move(cluster));
        ++cluster_id;
    }

    out.matrices_count = static_cast<int>(out.clusters.size());
    return out;
}

} // namespace widenull::clustering
