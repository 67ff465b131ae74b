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
#include <complex>
#include <span>

namespace widenull::numerics {

/// Result of a dense Hermitian eigendecomposition, eigenvalues sorted
/// descending, column m of eigenvectors paired with eigenvalues[m].
struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd eigenvectors;
};

/**
 * Eigendecomposition of a Hermitian matrix.
 *
 * The input is symmetrized as (A + A^H)/2 before decomposing, so small
 * Hermiticity violations from accumulated rounding are tolerated.
 * Eigenvalues come out descending; eigenvectors are orthonormal and satisfy
 * A v = d v to within ~1e-8 * |A|. Throws std::invalid_argument for
 * non-square or non-finite input.
 */
EigenDecomposition hermitian_evd(const Eigen::MatrixXcd& a);

/// Inverse standard normal CDF: returns z with Phi(z) = p, |Phi(z)-p| < 1e-9.
/// Throws std::invalid_argument unless 0 < p < 1.
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double z);

/**
 * Response of a tap vector at one FFT bin:
 *   sum_p taps[p] * exp(-i 2 pi f p / F)
 * with no normalization factor. Requires taps.size() <= fft_size and
 * 0 <= bin < fft_size.
 */
std::complex<double> dft_bin_response(std::span<const std::complex<double>> taps, int fft_size,
                                      int bin);

} // namespace widenull::numerics
