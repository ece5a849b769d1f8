#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hmclab/rng.hpp"

namespace hmclab {

using cplx = std::complex<double>;

/// Coefficients g_1..g_n of G(z) = sum_k g_k z^k. The constant term is
/// absent by construction; index 0 is always zero.
class GeneratorVec {
 public:
  GeneratorVec() : g_(1, cplx{}) {}

  /// `from_one[k-1]` becomes g_k.
  static GeneratorVec from_coefficients(std::span<const cplx> from_one);

  /// g_k = N_k / sqrt(k) for Gaussians given with gaussians[k] = N_k
  /// (gaussians[0] ignored).
  static GeneratorVec from_gaussians(std::span<const cplx> gaussians);

  [[nodiscard]] std::size_t degree() const noexcept { return g_.size() - 1; }

  /// g_k for k >= 1; zero beyond the stored degree.
  [[nodiscard]] cplx operator[](std::size_t k) const noexcept {
    return k < g_.size() ? g_[k] : cplx{};
  }

  /// Copy keeping only frequencies k <= cutoff.
  [[nodiscard]] GeneratorVec truncated(std::size_t cutoff) const;

  /// Raw storage, index 0 fixed at zero.
  [[nodiscard]] std::span<const cplx> data() const noexcept { return g_; }

 private:
  std::vector<cplx> g_;
};

/// Power-series coefficients c_0..c_n together with the chaos parameter.
struct CoeffVec {
  std::vector<cplx> coeffs;
  double theta = 1.0;

  [[nodiscard]] std::size_t degree() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  [[nodiscard]] cplx operator[](std::size_t k) const noexcept { return coeffs[k]; }
};

enum class ExpMethod {
  kAuto,       ///< quadratic recursion for small n, relaxed FFT above
  kQuadratic,  ///< reference O(n^2) first-derivative recursion
  kRelaxedFft  ///< online divide-and-conquer with FFT middle products
};

/// Degree at which kAuto switches to the relaxed FFT path.
inline constexpr std::size_t kRelaxedFftThreshold = 768;

/// Largest degree the composition-sum oracle accepts.
inline constexpr std::size_t kBruteForceMaxDegree = 14;

/// Coefficients of exp(sqrt(theta) G) to degree n, from
/// m c_m = sqrt(theta) sum_{k=1}^m k g_k c_{m-k}, c_0 = 1.
CoeffVec exp_series(const GeneratorVec& g, double theta, std::size_t n,
                    ExpMethod method = ExpMethod::kAuto);

/// Literal composition sum for [z^n] exp(sqrt(theta) G): the sum over all
/// (m_k) with sum k m_k = n of prod (sqrt(theta) g_k)^{m_k} / m_k!.
/// Throws SizeError for n > 14.
cplx brute_force_coeff(const GeneratorVec& g, double theta, std::size_t n);

/// c_{s,q} for s = 0..s_max: coefficients of exp(sqrt(theta) sum_{k<=q} g_k z^k).
CoeffVec restricted_exp(const GeneratorVec& g, double theta, std::size_t q, std::size_t s_max,
                        ExpMethod method = ExpMethod::kAuto);

/// Largest |m c_m - sqrt(theta) sum k g_k c_{m-k}| over m <= degree of c.
double recursion_residual(const GeneratorVec& g, double theta, const CoeffVec& c);

/// a_s with a_0 = 1 and m a_m = sum_{k=1}^{min(q,m)} a_{m-k}; this is the
/// probability that a uniform permutation of order s has all cycles of
/// length at most q, and equals E|c_{s,q}|^2 at theta = 1.
double expected_sq_norm_dp(std::size_t s, std::size_t q);

/// Same recursion, returning a_0..a_s.
std::vector<double> expected_sq_norm_table(std::size_t s_max, std::size_t q);

enum class CycleEvent {
  kAllCyclesAtMostQ,  ///< every cycle has length <= q
  kNoCycleAtMostQ     ///< every cycle has length > q
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
};

/// Cycle lengths of `perm` (a permutation of 0..s-1), in discovery order.
std::vector<std::size_t> cycle_lengths(std::span<const std::uint32_t> perm);

/// Monte Carlo probability of a cycle event over uniform permutations
/// (Fisher-Yates), one substream per replica.
McEstimate cycle_probability_mc(std::size_t s, std::size_t q, CycleEvent event, std::size_t replicas,
                                const Seed& seed, unsigned workers = 1);

}  // namespace hmclab
