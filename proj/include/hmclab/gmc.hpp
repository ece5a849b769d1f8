#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <type_traits>
#include <vector>

#include "hmclab/hmc.hpp"

namespace hmclab {

/// Frequency cutoff that may be infinite.
class Cutoff {
 public:
  static constexpr Cutoff finite(std::size_t n) { return Cutoff(n, false); }
  static constexpr Cutoff infinite() { return Cutoff(0, true); }

  [[nodiscard]] constexpr bool is_infinite() const noexcept { return infinite_; }
  [[nodiscard]] constexpr std::size_t value() const noexcept { return n_; }

 private:
  constexpr Cutoff(std::size_t n, bool inf) : n_(n), infinite_(inf) {}
  std::size_t n_;
  bool infinite_;
};

/// Variance 2 sum_{l<=n} r^{2l}/l of the truncated harmonic field; for an
/// infinite cutoff -2 log(1 - r^2). DomainError at (infinite, 1).
double v_n(Cutoff n, double r);

/// Covariance 2 sum_{l<=n} r^{2l}/l cos(l delta) of the field at two angles
/// delta apart; infinite cutoff gives -2 Re log(1 - r^2 e^{i delta}).
double covariance(Cutoff n, double r, double delta);

/// Distance from x to 2 pi Z.
double circle_distance(double x);

/// Nonnegative weights on the angles 2 pi j / M approximating mu_{n,r}.
struct GridMeasure {
  std::size_t m_points = 0;
  std::vector<double> weights;
  std::size_t n = 0;
  double r = 1.0;

  [[nodiscard]] double angle(std::size_t j) const noexcept {
    return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m_points);
  }
  [[nodiscard]] double total_mass() const noexcept;
};

/// Field 2 Re sum_{l<=n} (r e^{i angle})^l N_l / sqrt(l) on all M grid angles
/// via one length-M transform. gaussians[l] = N_l.
std::vector<double> field_on_grid(std::span<const cplx> gaussians, std::size_t n, double r, std::size_t m_points);

/// Same field at a single angle by direct summation.
double field_direct(std::span<const cplx> gaussians, std::size_t n, double r, double angle);

/// mu_{n,r} on an M-point grid. ResolutionError if M < 2n + 2.
GridMeasure mu_grid(std::span<const cplx> gaussians, std::size_t n, double r, std::size_t m_points);

/// sum_j f(angle_j) weight_j; f may return double or complex.
template <class F>
auto integrate(const GridMeasure& measure, F&& f) {
  using R = std::decay_t<decltype(f(0.0))>;
  R acc{};
  for (std::size_t j = 0; j < measure.m_points; ++j) acc += f(measure.angle(j)) * measure.weights[j];
  return acc;
}

/// Hermitian matrix with a numerical-PSD check.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  /// Throws DomainError if `m` is not square or not Hermitian to 1e-12
  /// relative.
  explicit HermitianMatrix(Eigen::MatrixXcd m);

  [[nodiscard]] Eigen::Index dim() const noexcept { return m_.rows(); }
  [[nodiscard]] const Eigen::MatrixXcd& matrix() const noexcept { return m_; }
  [[nodiscard]] cplx operator()(Eigen::Index j, Eigen::Index k) const { return m_(j, k); }
  [[nodiscard]] double trace() const { return m_.trace().real(); }
  [[nodiscard]] Eigen::VectorXd eigenvalues() const;
  /// Smallest eigenvalue is at least -1e-10 trace.
  [[nodiscard]] bool numerically_psd() const;

 private:
  Eigen::MatrixXcd m_;
};

/// Relative clamp level for negative eigenvalues.
inline constexpr double kPsdClampRelative = 1e-10;

/// H_{k1,k2} = integral of e^{i angle (k2 - k1)} against the measure,
/// 0 <= k1, k2 <= ell. ResolutionError unless 2 ell < M.
HermitianMatrix toeplitz_h(const GridMeasure& measure, std::size_t ell);

/// PSD square root by spectral decomposition; eigenvalues in
/// [-1e-10 trace, 0) are clamped to zero, lower ones raise NotPsdError.
HermitianMatrix herm_sqrt(const HermitianMatrix& h);

struct ParsevalResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error = 0.0;
};

/// Checks, on truncated objects, the discrete Parseval identity
///   sum_{s=-d}^{s_max} e^{-s m/u} |sum_r a_r c_{s+r,u}|^2
///     = (1/M) sum_j |p(e^{m/2u} e^{-i t_j})|^2 |F(t_j)|^2,
/// F(t) = sum_{s<=s_max} c_{s,u} e^{-s m/2u} e^{i s t}, with c_{k,u} := 0
/// outside [0, s_max]. Exact for M > 2 (s_max + deg p).
ParsevalResult parseval_check(const HmcSample& sample, std::size_t u, std::size_t m, const Poly& p,
                              std::size_t s_max, std::size_t m_points);

/// Relative gap between the truncated-series quadrature above and the same
/// quadrature with |F|^2 replaced by exp(2 Re sum_{k<=u} ...), i.e. the
/// untruncated field. Small values confirm that s_max captures the series.
double parseval_tail_diagnostic(const HmcSample& sample, std::size_t u, std::size_t m, const Poly& p,
                                std::size_t s_max, std::size_t m_points);

}  // namespace hmclab
