#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hmclab/errors.hpp"
#include "hmclab/rng.hpp"
#include "hmclab/series.hpp"
#include "../support/oracles.hpp"

using namespace hmclab;

namespace {

std::vector<cplx> gaussians(std::size_t n, const Seed& seed) {
  GaussianStream s(seed);
  std::vector<cplx> g(n + 1);
  s.fill_complex_gaussian(g.data() + 1, n);
  return g;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Fraction of permutations of {0..s-1} whose cycles all have length <= q.
double permutation_fraction(std::size_t s, std::size_t q) {
  std::vector<std::uint32_t> p(s);
  std::iota(p.begin(), p.end(), 0U);
  std::size_t good = 0, total = 0;
  do {
    const auto lens = cycle_lengths(p);
    good += std::all_of(lens.begin(), lens.end(), [q](std::size_t l) { return l <= q; });
    ++total;
  } while (std::next_permutation(p.begin(), p.end()));
  return static_cast<double>(good) / static_cast<double>(total);
}

}  // namespace

TEST_SUITE("series") {
  TEST_CASE("generator from gaussians divides by sqrt(k)") {
    const std::vector<cplx> n{0.0, {1.0, 2.0}, 4.0, {0.0, 9.0}};
    const auto g = GeneratorVec::from_gaussians(n);
    CHECK(g.degree() == 3);
    CHECK(g[0] == cplx{});
    CHECK(std::abs(g[2] - 4.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(g[3] - cplx(0.0, 9.0 / std::sqrt(3.0))) < 1e-15);
    CHECK(g[17] == cplx{});
    const auto t = g.truncated(1);
    CHECK(t.degree() == 1);
    CHECK(t[2] == cplx{});
  }

  TEST_CASE("forced gaussians N1 = N2 = 1 give c_2 = 1/2 + 1/sqrt(2)") {
    const auto g = GeneratorVec::from_gaussians(std::vector<cplx>{0.0, 1.0, 1.0});
    const CoeffVec c = exp_series(g, 1.0, 2);
    CHECK(c[0] == cplx{1.0});
    CHECK(std::abs(c[2] - (0.5 + 1.0 / std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs(brute_force_coeff(g, 1.0, 2) - (0.5 + 1.0 / std::sqrt(2.0))) < 1e-15);
  }

  TEST_CASE("zero generator gives c = (1, 0, 0, ...)") {
    const auto g = GeneratorVec::from_coefficients(std::vector<cplx>(2000));
    for (auto method : {ExpMethod::kQuadratic, ExpMethod::kRelaxedFft}) {
      const CoeffVec c = exp_series(g, 1.0, 2000, method);
      CHECK(c[0] == cplx{1.0});
      double worst = 0.0;
      for (std::size_t k = 1; k <= 2000; ++k) worst = std::max(worst, std::abs(c[k]));
      CHECK(worst == 0.0);
    }
  }

  TEST_CASE("both expansion paths agree with the composition sum for n <= 10") {
    for (std::uint64_t i = 0; i < 30; ++i) {
      const auto g = GeneratorVec::from_gaussians(gaussians(10, Seed(21, {i})));
      for (double theta : {1.0, 0.3, 2.5}) {
        const CoeffVec q = exp_series(g, theta, 10, ExpMethod::kQuadratic);
        const CoeffVec f = exp_series(g, theta, 10, ExpMethod::kRelaxedFft);
        for (std::size_t n = 0; n <= 10; ++n) {
          const cplx ref = brute_force_coeff(g, theta, n);
          CHECK(std::abs(q[n] - ref) <= 1e-10 * std::abs(ref));
          CHECK(std::abs(f[n] - ref) <= 1e-10 * std::abs(ref));
        }
      }
    }
  }

  TEST_CASE("expansion matches the power-sum definition of exp up to degree 40") {
    const auto raw = gaussians(40, Seed(22));
    const auto g = GeneratorVec::from_gaussians(raw);
    std::vector<cplx> gk(41);
    for (std::size_t k = 1; k <= 40; ++k) gk[k] = raw[k] / std::sqrt(static_cast<double>(k));
    const auto ref = oracle::exp_by_powers(gk, 1.0, 40);
    const CoeffVec c = exp_series(g, 1.0, 40);
    for (std::size_t n = 0; n <= 40; ++n) CHECK(rel(c[n], ref[n]) < 1e-12);
  }

  TEST_CASE("relaxed FFT path matches the quadratic recursion at large degree") {
    for (std::size_t n : {700, 769, 3000, 8192}) {
      CAPTURE(n);
      const auto g = GeneratorVec::from_gaussians(gaussians(n, Seed(23, {n})));
      const CoeffVec q = exp_series(g, 1.0, n, ExpMethod::kQuadratic);
      const CoeffVec f = exp_series(g, 1.0, n, ExpMethod::kRelaxedFft);
      double worst = 0.0;
      for (std::size_t k = 0; k <= n; ++k) worst = std::max(worst, rel(f[k], q[k]));
      CHECK(worst < 1e-10);
      CHECK(recursion_residual(g, 1.0, f) < 1e-9);
    }
  }

  TEST_CASE("argument validation") {
    const auto g = GeneratorVec::from_gaussians(gaussians(20, Seed(1)));
    CHECK_THROWS_AS(exp_series(g, 0.0, 5), DomainError);
    CHECK_THROWS_AS(exp_series(g, -1.0, 5), DomainError);
    CHECK_THROWS_AS(exp_series(g, std::nan(""), 5), DomainError);
    CHECK_THROWS_AS(brute_force_coeff(g, 1.0, 15), SizeError);
    CHECK_NOTHROW(brute_force_coeff(g, 1.0, 14));
    CHECK_THROWS_AS(restricted_exp(g, 1.0, 0, 5), DomainError);
  }

  TEST_CASE("restricted expansion") {
    const auto g = GeneratorVec::from_gaussians(gaussians(30, Seed(24)));
    // q >= s: no frequency is cut.
    const CoeffVec full = exp_series(g, 1.0, 12);
    const CoeffVec r = restricted_exp(g, 1.0, 12, 12);
    for (std::size_t s = 0; s <= 12; ++s) CHECK(rel(r[s], full[s]) < 1e-14);
    // q = 1: exp(g_1 z).
    const CoeffVec one = restricted_exp(g, 1.0, 1, 8);
    cplx term = 1.0;
    for (std::size_t s = 0; s <= 8; ++s) {
      CHECK(rel(one[s], term) < 1e-14);
      term *= g[1] / static_cast<double>(s + 1);
    }
  }

  TEST_CASE("second-moment recursion equals exact permutation counts") {
    CHECK(expected_sq_norm_dp(3, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    for (std::size_t s = 1; s <= 8; ++s) {
      CHECK(expected_sq_norm_dp(s, s) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(expected_sq_norm_dp(s, 1) == doctest::Approx(1.0 / std::tgamma(s + 1.0)).epsilon(1e-13));
      for (std::size_t q = 1; q <= s; ++q) {
        CAPTURE(s);
        CAPTURE(q);
        CHECK(expected_sq_norm_dp(s, q) == doctest::Approx(permutation_fraction(s, q)).epsilon(1e-12));
      }
    }
    const auto table = expected_sq_norm_table(6, 2);
    CHECK(table.size() == 7);
    CHECK(table[0] == 1.0);
  }

  TEST_CASE("cycle lengths of a known permutation") {
    const std::vector<std::uint32_t> p{1, 2, 0, 4, 3, 5};
    auto lens = cycle_lengths(p);
    std::sort(lens.begin(), lens.end());
    CHECK(lens == std::vector<std::size_t>{1, 2, 3});
  }

  TEST_CASE("permutation Monte Carlo is reproducible across worker counts") {
    const auto a = cycle_probability_mc(10, 3, CycleEvent::kAllCyclesAtMostQ, 5000, Seed(25), 1);
    const auto b = cycle_probability_mc(10, 3, CycleEvent::kAllCyclesAtMostQ, 5000, Seed(25), 3);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(std::abs(a.mean - expected_sq_norm_dp(10, 3)) < 4.0 * a.std_error);
  }

  TEST_CASE("derangement probability from the complementary event") {
    const auto est = cycle_probability_mc(30, 1, CycleEvent::kNoCycleAtMostQ, 40000, Seed(26), 1);
    CHECK(std::abs(est.mean - std::exp(-1.0)) < 4.0 * est.std_error);
  }
}
