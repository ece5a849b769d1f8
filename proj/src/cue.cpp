#include "hmclab/cue.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmclab/errors.hpp"
#include "hmclab/hmc.hpp"

namespace hmclab {

double SecularSet::invariant_defect() const {
  if (coeffs.size() != dim + 1) return INFINITY;
  double worst = std::abs(coeffs[0] - cplx{1.0});
  worst = std::max(worst, std::abs(std::abs(coeffs[dim]) - 1.0));
  for (std::size_t k = 0; k <= dim; ++k) {
    worst = std::max(worst, std::abs(std::abs(coeffs[dim - k]) - std::abs(coeffs[k])));
  }
  return worst;
}

std::vector<cplx> sample_verblunsky_cue(std::size_t n_dim, GaussianStream& stream) {
  if (n_dim < 1) throw DomainError("sample_verblunsky_cue: N must be at least 1");
  std::vector<cplx> alpha(n_dim);
  for (std::size_t k = 0; k + 1 < n_dim; ++k) {
    // |alpha|^2 ~ Beta(1, N-k-1): 1 - U^{1/(N-k-1)}.
    const auto b = static_cast<double>(n_dim - k - 1);
    const auto blk = stream.next_block();
    const double u = static_cast<double>(blk[0] >> 11) * 0x1.0p-53;
    const double radius_sq = -std::expm1(std::log1p(-u) / b);
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(blk[1] >> 11) * 0x1.0p-53;
    alpha[k] = std::polar(std::sqrt(radius_sq), phase);
  }
  alpha[n_dim - 1] = std::polar(1.0, 2.0 * std::numbers::pi * stream.next_uniform());
  return alpha;
}

std::vector<cplx> szego_reversed(const std::vector<cplx>& alpha, std::size_t max_degree) {
  const std::size_t n_dim = alpha.size();
  const std::size_t top = std::min(max_degree, n_dim);
  // Coefficients of Phi_k and Phi_k^* up to degree `top`; Phi_0 = Phi_0^* = 1.
  std::vector<cplx> phi(top + 1);
  std::vector<cplx> phi_star(top + 1);
  phi[0] = 1.0;
  phi_star[0] = 1.0;
  for (std::size_t k = 0; k < n_dim; ++k) {
    const cplx a = alpha[k];
    const cplx ca = std::conj(a);
    const std::size_t hi = std::min(top, k + 1);
    // Descending j so phi[j - 1] still holds Phi_k when it is read.
    for (std::size_t j = hi; j >= 1; --j) {
      const cplx p_prev = phi[j - 1];
      const cplx ps = phi_star[j];
      phi[j] = p_prev - ca * ps;
      phi_star[j] = ps - a * p_prev;
    }
    phi[0] = -ca * phi_star[0];
    // phi_star[0] is unchanged: Phi_{k+1}^*(0) = Phi_k^*(0) = 1.
  }
  return phi_star;
}

SecularSet sample_secular_szego(std::size_t n_dim, GaussianStream& stream) {
  const auto alpha = sample_verblunsky_cue(n_dim, stream);
  SecularSet s;
  s.dim = n_dim;
  s.coeffs = szego_reversed(alpha, n_dim);
  return s;
}

SecularSet sample_secular_szego(std::size_t n_dim, const Seed& seed) {
  GaussianStream stream(seed);
  return sample_secular_szego(n_dim, stream);
}

std::vector<cplx> secular_prefix_szego(std::size_t n_dim, std::size_t max_degree, GaussianStream& stream) {
  return szego_reversed(sample_verblunsky_cue(n_dim, stream), max_degree);
}

Eigen::MatrixXcd sample_haar_unitary(std::size_t n_dim, GaussianStream& stream) {
  if (n_dim < 1) throw DomainError("sample_haar_unitary: N must be at least 1");
  if (n_dim > kQrMaxDim) throw SizeError("sample_haar_unitary: QR oracle limited to N <= 64");
  const auto n = static_cast<Eigen::Index>(n_dim);
  Eigen::MatrixXcd z(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = stream.next_complex_gaussian();
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

SecularSet secular_from_unitary(const Eigen::MatrixXcd& u) {
  if (u.rows() != u.cols()) throw DomainError("secular_from_unitary: matrix must be square");
  const auto n_dim = static_cast<std::size_t>(u.rows());
  std::vector<cplx> traces(n_dim + 1);
  Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  for (std::size_t k = 1; k <= n_dim; ++k) {
    power = (power * u).eval();
    traces[k] = power.trace();
  }
  // k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} p_i; det(I - zU) = sum (-z)^k e_k.
  std::vector<cplx> e(n_dim + 1);
  e[0] = 1.0;
  for (std::size_t k = 1; k <= n_dim; ++k) {
    cplx sum{};
    for (std::size_t i = 1; i <= k; ++i) {
      const double sign = (i % 2 == 1) ? 1.0 : -1.0;
      sum += sign * e[k - i] * traces[i];
    }
    e[k] = sum / static_cast<double>(k);
  }
  SecularSet s;
  s.dim = n_dim;
  s.coeffs.resize(n_dim + 1);
  for (std::size_t k = 0; k <= n_dim; ++k) s.coeffs[k] = (k % 2 == 0 ? 1.0 : -1.0) * e[k];
  return s;
}

SecularSet sample_secular_qr(std::size_t n_dim, GaussianStream& stream) {
  return secular_from_unitary(sample_haar_unitary(n_dim, stream));
}

SecularSet sample_secular_qr(std::size_t n_dim, const Seed& seed) {
  GaussianStream stream(seed);
  return sample_secular_qr(n_dim, stream);
}

double scaled_secular_stat(const SecularSet& s, std::size_t n) {
  if (n < 2 || n > s.dim || n >= s.coeffs.size()) {
    throw DomainError("scaled_secular_stat: index must satisfy 2 <= n <= N");
  }
  return scaled_modulus_sq_value(s.coeffs[n], n);
}

}  // namespace hmclab
