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

#include "widenull/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace widenull::numerics {

EigenDecomposition hermitian_evd(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols() || a.rows() < 1)
        throw std::invalid_argument("hermitian_evd: matrix must be square with dim >= 1");
    if (!a.allFinite())
        throw std::invalid_argument("hermitian_evd: matrix has non-finite entries");

    const Eigen::MatrixXcd sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_evd: eigensolver failed to converge");

    // Eigen returns ascending order; flip to descending.
    const Eigen::Index n = sym.rows();
    EigenDecomposition out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        out.eigenvectors.col(j) = solver.eigenvectors().col(n - 1 - j);
    return out;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

// Acklam's rational approximation to the inverse normal CDF (~1e-9 relative).
double inverse_normal_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");

    double z = inverse_normal_approx(p);
    // One Halley refinement against the true CDF pushes the error to
    // machine precision.
    for (int it = 0; it < 2; ++it) {
        const double e = normal_cdf(z) - p;
        const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * z * z);
        z -= u / (1.0 + 0.5 * z * u);
    }
    return z;
}

std::complex<double> dft_bin_response(std::span<const std::complex<double>> taps, int fft_size,
                                      int bin) {
    const int num_taps = static_cast<int>(taps.size());
    if (fft_size < 1 || num_taps > fft_size)
        throw std::invalid_argument("dft_bin_response: taps exceed FFT support");
    if (bin < 0 || bin >= fft_size)
        throw std::invalid_argument("dft_bin_response: bin index out of range");

    // Phase computed from (bin*p) mod F exactly, so no recurrence drift.
    std::complex<double> acc{0.0, 0.0};
    const double scale = -2.0 * 3.14159265358979323846 / static_cast<double>(fft_size);
    for (int p = 0; p < num_taps; ++p) {
        const long long k = (static_cast<long long>(bin) * p) % fft_size;
        acc += taps[p] * std::polar(1.0, scale * static_cast<double>(k));
    }
    return acc;
}

} // namespace widenull::numerics
