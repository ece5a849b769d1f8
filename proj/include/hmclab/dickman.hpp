#pragma once

#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "hmclab/rng.hpp"

namespace hmclab {

/// Dickman rho tabulated on the grid i*h, 0 <= i*h <= x_max, together with
/// the running integral of rho used for the Dickman distribution (density
/// e^{-gamma_E} rho).
class DickmanTable {
 public:
  static constexpr double gamma_e = std::numbers::egamma;

  DickmanTable(double h, double x_max, std::vector<double> values, std::vector<double> running_integral);

  [[nodiscard]] double h() const noexcept { return h_; }
  [[nodiscard]] double x_max() const noexcept { return x_max_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] std::size_t steps_per_unit() const noexcept { return per_unit_; }

  /// rho(x) by cubic Hermite interpolation with rho'(x) = -rho(x-1)/x;
  /// 1 on [0,1], 0 beyond x_max.
  [[nodiscard]] double rho(double x) const;
  /// rho'(x); right derivative at x = 1.
  [[nodiscard]] double rho_derivative(double x) const;
  /// Integral of rho over [0, x].
  [[nodiscard]] double integral(double x) const;
  /// Integral of rho over the whole table.
  [[nodiscard]] double total_integral() const noexcept { return running_.back(); }

  /// e^{-gamma_E} * integral(x); 0 for x <= 0, exactly 1 at +infinity.
  [[nodiscard]] double cdf(double x) const;
  /// Monotone inverse of cdf on [0, x_max].
  [[nodiscard]] double quantile(double p) const;

 private:
  double h_;
  double x_max_;
  std::size_t per_unit_;
  std::vector<double> values_;
  std::vector<double> running_;
};

/// Method of steps for x rho'(x) + rho(x-1) = 0, rho = 1 on [0,1]:
/// rho(x_{i+1}) = rho(x_i) - integral of rho(t-1)/t over one step, with a
/// four-point rule whose nodes are grid points lying in the same unit
/// interval, so delayed values are read from the table without
/// interpolation. DomainError unless 0 < h <= 1e-3, 1/h is an integer and
/// x_max >= 2.
DickmanTable solve_rho(double h = 1e-4, double x_max = 20.0);

/// Writes columns `x,rho` every `stride` grid points.
void write_rho_csv(const DickmanTable& table, const std::string& path, std::size_t stride = 100);

/// (1/u) sum_{l<=u} l Z_l with Z_l ~ Poisson(1/l) independent.
double sample_x_poisson(std::size_t u, GaussianStream& stream);
double sample_x_poisson(std::size_t u, const Seed& seed);

/// Dickman variable by inversion of the tabulated CDF.
double sample_x_inverse(const DickmanTable& table, GaussianStream& stream);

/// 1{e^{-(L-K)/K} < x <= e^{-(L-K-1)/K}} / (L/K + log x). DomainError unless
/// 1 <= K <= L-1 and 0 <= x <= 1.
double psi(std::size_t L, std::size_t K, double x);

/// sum_{K=1}^{L-1} integral of psi_{L,K}(e^{-y}) e^{-gamma_E} rho(y) dy.
double limit_dickman_sum(std::size_t L, const DickmanTable& table);

/// Same sum after the substitution y = (L-K-t)/K:
/// sum_K e^{-gamma_E} integral_0^1 rho((L-K-t)/K) / (K+t) dt.
double limit_dickman_sum_substituted(std::size_t L, const DickmanTable& table);

/// sqrt(e^{gamma_E} limit_dickman_sum(L)).
double b_of_l(std::size_t L, const DickmanTable& table);

/// integral_0^1 rho((1-v)/v) / v dv.
double rho_reciprocal_integral(const DickmanTable& table);

/// E e^{-s X} = exp(-integral_0^1 (1 - e^{-s t})/t dt).
double dickman_laplace(double s);

}  // namespace hmclab
