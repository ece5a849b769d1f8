#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

#include "hmclab/rng.hpp"
#include "hmclab/series.hpp"

namespace hmclab {

/// Coefficients c_0..c_N of det(I - z U) for one U in U(N).
struct SecularSet {
  std::size_t dim = 0;
  std::vector<cplx> coeffs;

  /// Largest violation of c_0 = 1, |c_N| = 1 and |c_{N-k}| = |c_k|.
  [[nodiscard]] double invariant_defect() const;
};

/// Largest QR-oracle dimension.
inline constexpr std::size_t kQrMaxDim = 64;

/// Verblunsky coefficients alpha_0..alpha_{N-1} with the CUE law:
/// alpha_k has density proportional to (1 - |alpha|^2)^{N-k-2} on the disk
/// for k <= N-2, and alpha_{N-1} is uniform on the circle.
std::vector<cplx> sample_verblunsky_cue(std::size_t n_dim, GaussianStream& stream);

/// Runs the Szego recursion Phi_{k+1} = z Phi_k - conj(alpha_k) Phi_k^* and
/// returns the coefficients of Phi_N^* up to degree `max_degree` (clipped to N).
/// O(N * max_degree) time.
std::vector<cplx> szego_reversed(const std::vector<cplx>& alpha, std::size_t max_degree);

/// Secular coefficients via the Szego recursion; same law as det(I - zU),
/// U Haar on U(N). O(N^2).
SecularSet sample_secular_szego(std::size_t n_dim, GaussianStream& stream);
SecularSet sample_secular_szego(std::size_t n_dim, const Seed& seed);

/// First `max_degree + 1` coefficients of the sample above, from the same
/// Verblunsky draws, in O(N * max_degree).
std::vector<cplx> secular_prefix_szego(std::size_t n_dim, std::size_t max_degree, GaussianStream& stream);

/// Haar unitary: Gaussian matrix, Householder QR, column j scaled by the
/// phase of R_jj. SizeError for N > 64.
Eigen::MatrixXcd sample_haar_unitary(std::size_t n_dim, GaussianStream& stream);

/// det(I - zU) by Newton's identities on the power traces tr(U^k).
SecularSet secular_from_unitary(const Eigen::MatrixXcd& u);

SecularSet sample_secular_qr(std::size_t n_dim, GaussianStream& stream);
SecularSet sample_secular_qr(std::size_t n_dim, const Seed& seed);

/// sqrt(pi) |c_n|^2 sqrt(log n); DomainError unless 2 <= n <= N.
double scaled_secular_stat(const SecularSet& s, std::size_t n);

}  // namespace hmclab
