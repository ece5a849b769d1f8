#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "hmclab/rng.hpp"
#include "hmclab/series.hpp"

namespace hmclab {

/// One draw of the holomorphic chaos: Gaussians N_1..N_{n+d} (stored with
/// gaussians[k] = N_k, gaussians[0] = 0) and c_0..c_{n+d}.
struct HmcSample {
  std::vector<cplx> gaussians;
  CoeffVec coeffs;

  [[nodiscard]] std::size_t max_index() const noexcept { return coeffs.degree(); }
  [[nodiscard]] double theta() const noexcept { return coeffs.theta; }
  [[nodiscard]] cplx c(std::size_t k) const noexcept { return coeffs.coeffs[k]; }
};

/// Draws N_1..N_{n+d} from `stream` in index order and expands the series.
HmcSample sample_coeffs(std::size_t n, std::size_t d, double theta, GaussianStream& stream,
                        ExpMethod method = ExpMethod::kAuto);
HmcSample sample_coeffs(std::size_t n, std::size_t d, double theta, const Seed& seed,
                        ExpMethod method = ExpMethod::kAuto);

/// Builds a sample from explicitly given Gaussians (gaussians[0] ignored).
HmcSample sample_from_gaussians(std::vector<cplx> gaussians, double theta,
                                ExpMethod method = ExpMethod::kAuto);

/// Target index n, shift r and block count L of the good/bad split of c_{n+r}.
struct SplitConfig {
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t L = 2;

  /// Throws DomainError unless L >= 2 and n >= L (so the block edges
  /// floor(Kn/L) are strictly increasing).
  void validate() const;
  /// floor(K n / L).
  [[nodiscard]] std::size_t edge(std::size_t K) const noexcept { return K * n / L; }
};

struct SplitResult {
  cplx good;
  cplx bad;
};

/// Good part of c_{n+r}, from its martingale representation
///   sum_{K=1}^{L-1} sum_{floor(Kn/L) < q <= floor((K+1)n/L)} sqrt(theta) (N_q/sqrt q) c_{n+r-q, floor(Kn/L)}.
/// Throws SizeError if the sample holds fewer than n + r Gaussians.
cplx good_part(const HmcSample& sample, const SplitConfig& cfg);

/// c_{n+r} - good_part.
cplx bad_part(const HmcSample& sample, const SplitConfig& cfg);

SplitResult split(const HmcSample& sample, const SplitConfig& cfg);

/// Good and bad parts by literally classifying every composition of n + r:
/// good when the largest active frequency q has multiplicity one, lies in a
/// block (floor(Kn/L), floor((K+1)n/L)] with K >= 1, and every other active
/// frequency is at most floor(Kn/L). Exponential cost; SizeError for
/// n + r > 14.
SplitResult split_enumerated(const HmcSample& sample, const SplitConfig& cfg);

/// Summand of the good part for a single frequency q (used for
/// martingale-difference checks).
cplx good_term(const HmcSample& sample, const SplitConfig& cfg, std::size_t q);

/// p(z) = sum_r a_r z^r.
struct Poly {
  std::vector<cplx> a;

  [[nodiscard]] std::size_t degree() const noexcept { return a.empty() ? 0 : a.size() - 1; }
  [[nodiscard]] cplx operator()(cplx z) const noexcept;
};

/// X_n(p) = sum_r a_r c_{n+r}.
cplx x_n_p(const HmcSample& sample, const Poly& p, std::size_t n);

/// sqrt(pi) |c_n|^2 sqrt(log n); DomainError for n < 2.
double scaled_modulus_sq(const HmcSample& sample, std::size_t n);
double scaled_modulus_sq_value(cplx c_n, std::size_t n);

}  // namespace hmclab
