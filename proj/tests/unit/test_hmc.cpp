#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "hmclab/errors.hpp"
#include "hmclab/hmc.hpp"
#include "../support/oracles.hpp"

using namespace hmclab;

namespace {

std::vector<cplx> scaled_generator(const HmcSample& s) {
  std::vector<cplx> g(s.gaussians.size());
  for (std::size_t k = 1; k < g.size(); ++k) g[k] = s.gaussians[k] / std::sqrt(static_cast<double>(k));
  return g;
}

}  // namespace

TEST_SUITE("hmc") {
  TEST_CASE("samples are reproducible and hold the expansion of their gaussians") {
    const HmcSample a = sample_coeffs(50, 3, 1.0, Seed(31));
    const HmcSample b = sample_coeffs(50, 3, 1.0, Seed(31));
    CHECK(a.max_index() == 53);
    CHECK(a.gaussians.size() == 54);
    CHECK(a.gaussians[0] == cplx{});
    CHECK(a.c(0) == cplx{1.0});
    for (std::size_t k = 0; k <= 53; ++k) CHECK(a.c(k) == b.c(k));
    const CoeffVec direct = exp_series(GeneratorVec::from_gaussians(a.gaussians), 1.0, 53);
    for (std::size_t k = 0; k <= 53; ++k) CHECK(std::abs(direct[k] - a.c(k)) < 1e-13);
    CHECK_THROWS_AS(sample_coeffs(0, 0, 1.0, Seed(1)), DomainError);
  }

  TEST_CASE("prefix property: a longer sample extends a shorter one") {
    const HmcSample shortd = sample_coeffs(100, 0, 1.0, Seed(32));
    const HmcSample longd = sample_coeffs(5000, 0, 1.0, Seed(32));
    for (std::size_t k = 0; k <= 100; ++k) CHECK(std::abs(shortd.c(k) - longd.c(k)) < 1e-12 * std::max(1.0, std::abs(shortd.c(k))));
  }

  TEST_CASE("good + bad reproduces the coefficient") {
    for (const SplitConfig cfg : {SplitConfig{2, 0, 2}, SplitConfig{10, 1, 3}, SplitConfig{97, 2, 5},
                                  SplitConfig{1000, 0, 7}, SplitConfig{2048, 1, 64}}) {
      const HmcSample s = sample_coeffs(cfg.n, cfg.r, 1.0, Seed(33, {cfg.n}));
      const SplitResult sp = split(s, cfg);
      const cplx c = s.c(cfg.n + cfg.r);
      CHECK(std::abs(sp.good + sp.bad - c) <= 1e-10 * std::abs(c));
      CHECK(std::abs(good_part(s, cfg) - sp.good) == 0.0);
      CHECK(std::abs(bad_part(s, cfg) - sp.bad) == 0.0);
    }
  }

  TEST_CASE("martingale representation equals the partition classification for small n") {
    for (std::size_t L : {2, 3}) {
      for (std::size_t n = L; n <= 12; ++n) {
        for (std::size_t r = 0; r <= 2; ++r) {
          for (double theta : {1.0, 0.6}) {
            CAPTURE(L);
            CAPTURE(n);
            CAPTURE(r);
            const HmcSample s = sample_coeffs(n, r, theta, Seed(34, {L, n, r}));
            const SplitConfig cfg{n, r, L};
            const auto ref = oracle::split_by_partitions(scaled_generator(s), theta, n, r, L);
            const SplitResult fast = split(s, cfg);
            const SplitResult lit = split_enumerated(s, cfg);
            CHECK(std::abs(fast.good - ref.good) <= 1e-10 * std::max(1.0, std::abs(ref.good)));
            CHECK(std::abs(fast.bad - ref.bad) <= 1e-10 * std::max(1.0, std::abs(ref.bad)));
            CHECK(std::abs(lit.good - ref.good) <= 1e-12 * std::max(1.0, std::abs(ref.good)));
          }
        }
      }
    }
  }

  TEST_CASE("single surviving gaussian") {
    const std::size_t n = 10;
    std::vector<cplx> g(n + 1);
    g[n] = 1.0;
    const HmcSample s = sample_from_gaussians(g, 1.0);
    CHECK(std::abs(good_part(s, {n, 0, 2}) - 1.0 / std::sqrt(10.0)) < 1e-15);
    CHECK(std::abs(bad_part(s, {n, 0, 2})) < 1e-15);
  }

  TEST_CASE("L = 2, r = 0 double sum written out") {
    const std::size_t n = 40;
    const HmcSample s = sample_coeffs(n, 0, 1.0, Seed(35));
    const CoeffVec half = restricted_exp(GeneratorVec::from_gaussians(s.gaussians), 1.0, n / 2, n);
    cplx expect{};
    for (std::size_t q = n / 2 + 1; q <= n; ++q) expect += s.gaussians[q] / std::sqrt(static_cast<double>(q)) * half[n - q];
    CHECK(std::abs(good_part(s, {n, 0, 2}) - expect) < 1e-13);
    cplx by_terms{};
    for (std::size_t q = 1; q <= n; ++q) by_terms += good_term(s, {n, 0, 2}, q);
    CHECK(std::abs(by_terms - expect) < 1e-13);
  }

  TEST_CASE("split argument validation") {
    const HmcSample s = sample_coeffs(20, 0, 1.0, Seed(36));
    CHECK_THROWS_AS(good_part(s, {20, 0, 1}), DomainError);
    CHECK_THROWS_AS(good_part(s, {3, 0, 4}), DomainError);
    CHECK_THROWS_AS(good_part(s, {20, 1, 2}), SizeError);
    CHECK_THROWS_AS(split_enumerated(sample_coeffs(14, 1, 1.0, Seed(1)), {14, 1, 2}), SizeError);
  }

  TEST_CASE("distinct good-part increments are uncorrelated") {
    const SplitConfig cfg{32, 0, 4};
    constexpr int kReps = 20000;
    std::vector<double> re(kReps), im(kReps);
    for (int i = 0; i < kReps; ++i) {
      const HmcSample s = sample_coeffs(32, 0, 1.0, Seed(37, {static_cast<std::uint64_t>(i)}));
      const cplx prod = good_term(s, cfg, 12) * std::conj(good_term(s, cfg, 25));
      re[i] = prod.real();
      im[i] = prod.imag();
    }
    const auto mr = oracle::moments(re);
    const auto mi = oracle::moments(im);
    CHECK(std::abs(mr.mean) < 3.0 * mr.se);
    CHECK(std::abs(mi.mean) < 3.0 * mi.se);
  }

  TEST_CASE("linear statistics") {
    const HmcSample s = sample_coeffs(30, 2, 1.0, Seed(38));
    CHECK(x_n_p(s, Poly{{1.0}}, 30) == s.c(30));
    CHECK(x_n_p(s, Poly{{0.0, 1.0}}, 30) == s.c(31));
    CHECK(std::abs(x_n_p(s, Poly{{1.0, 1.0}}, 30) - (s.c(30) + s.c(31))) == 0.0);
    CHECK_THROWS_AS(x_n_p(s, Poly{{1.0, 0.0, 0.0, 1.0}}, 30), SizeError);
    const Poly p{{1.0, 2.0, 3.0}};
    CHECK(std::abs(p(cplx(0.0, 1.0)) - cplx(-2.0, 2.0)) < 1e-15);
  }

  TEST_CASE("scaled modulus statistic") {
    CHECK(scaled_modulus_sq_value(0.0, 10) == 0.0);
    const auto n = static_cast<std::size_t>(std::lround(std::exp(4.0)));
    CHECK(scaled_modulus_sq_value(std::polar(1.0, 0.3), n) == doctest::Approx(2.0 * std::sqrt(std::numbers::pi)).epsilon(1e-3));
    CHECK_THROWS_AS(scaled_modulus_sq_value(1.0, 1), DomainError);
    const HmcSample s = sample_coeffs(5, 0, 1.0, Seed(1));
    CHECK_THROWS_AS(scaled_modulus_sq(s, 6), SizeError);
  }

  TEST_CASE("second moment at n = 64") {
    constexpr int kReps = 20000;
    std::vector<double> v(kReps);
    for (int i = 0; i < kReps; ++i) v[i] = std::norm(sample_coeffs(64, 0, 1.0, Seed(39, {static_cast<std::uint64_t>(i)})).c(64));
    const auto m = oracle::moments(v);
    CHECK(std::abs(m.mean - 1.0) < 4.0 * m.se);
  }
}
