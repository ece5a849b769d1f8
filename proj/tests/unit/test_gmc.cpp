#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "hmclab/errors.hpp"
#include "hmclab/gmc.hpp"

using namespace hmclab;

namespace {

std::vector<cplx> gaussians(std::size_t n, const Seed& seed) {
  GaussianStream s(seed);
  std::vector<cplx> g(n + 1);
  s.fill_complex_gaussian(g.data() + 1, n);
  return g;
}

GridMeasure uniform_measure(std::size_t m) {
  GridMeasure mu;
  mu.m_points = m;
  mu.weights.assign(m, 1.0 / static_cast<double>(m));
  return mu;
}

}  // namespace

TEST_SUITE("gmc") {
  TEST_CASE("field variance") {
    CHECK(v_n(Cutoff::finite(1), 0.7) == doctest::Approx(2 * 0.49));
    CHECK(v_n(Cutoff::finite(3), 1.0) == doctest::Approx(11.0 / 3.0));
    CHECK(v_n(Cutoff::infinite(), std::sqrt(0.5)) == doctest::Approx(2.0 * std::log(2.0)));
    CHECK_THROWS_AS(v_n(Cutoff::infinite(), 1.0), DomainError);
    CHECK_THROWS_AS(v_n(Cutoff::finite(3), 0.0), DomainError);
    CHECK_THROWS_AS(v_n(Cutoff::finite(3), 1.5), DomainError);
  }

  TEST_CASE("covariance values") {
    CHECK(covariance(Cutoff::finite(7), 0.8, 0.0) == v_n(Cutoff::finite(7), 0.8));
    CHECK(covariance(Cutoff::finite(2), 1.0, std::numbers::pi) == doctest::Approx(-1.0).epsilon(1e-14));
    const double closed = covariance(Cutoff::infinite(), 0.9, std::numbers::pi / 2);
    CHECK(closed == doctest::Approx(-std::log(1.0 + 0.81 * 0.81)).epsilon(1e-14));
    CHECK(std::abs(covariance(Cutoff::finite(600), 0.9, std::numbers::pi / 2) - closed) < 1e-8);
    CHECK_THROWS_AS(covariance(Cutoff::infinite(), 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(covariance(Cutoff::infinite(), 1.0, 2.0 * std::numbers::pi), DomainError);
    CHECK_NOTHROW(covariance(Cutoff::infinite(), 1.0, 0.5));
    CHECK(circle_distance(2.0 * std::numbers::pi - 0.25) == doctest::Approx(0.25));
  }

  TEST_CASE("covariance residual bounds on log-spaced angles") {
    double worst_residual = 0.0, worst_log = 0.0;
    for (std::size_t n : {256, 1024, 4096}) {
      for (int k = 0; k < 100; ++k) {
        const double d = 1e-3 * std::pow(std::numbers::pi / 1e-3, k / 99.0);
        const double c = covariance(Cutoff::finite(n), 1.0, d);
        worst_residual = std::max(worst_residual, std::abs(c + 2.0 * std::log(std::abs(std::polar(1.0, d) - 1.0))) * d * n);
        worst_log = std::max(worst_log, std::abs(c - 2.0 * std::min(std::log(double(n)), std::log(1.0 / d))));
      }
    }
    CHECK(worst_residual <= 50.0);
    CHECK(worst_log <= 10.0);
  }

  TEST_CASE("measure with zero field has constant weights") {
    const std::size_t n = 64;
    const GridMeasure mu = mu_grid(std::vector<cplx>(n + 1), n, 1.0, 4 * n);
    const double v = v_n(Cutoff::finite(n), 1.0);
    CHECK(mu.total_mass() == doctest::Approx(std::sqrt(v / 2) * std::exp(-v / 2)).epsilon(1e-13));
    CHECK(integrate(mu, [](double) { return 1.0; }) == doctest::Approx(mu.total_mass()).epsilon(1e-15));
  }

  TEST_CASE("field by transform equals direct summation") {
    const std::size_t n = 256;
    const auto g = gaussians(n, Seed(41));
    const std::size_t m = 4 * n;
    const auto field = field_on_grid(g, n, 0.97, m);
    GaussianStream pick(Seed(42));
    for (int i = 0; i < 16; ++i) {
      const std::size_t j = pick.next_index(m);
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
      CHECK(std::abs(field[j] - field_direct(g, n, 0.97, angle)) < 1e-10);
    }
  }

  TEST_CASE("mu_grid validation and positivity") {
    const std::size_t n = 128;
    const auto g = gaussians(n, Seed(43));
    CHECK_THROWS_AS(mu_grid(g, n, 1.0, 2 * n + 1), ResolutionError);
    CHECK_NOTHROW(mu_grid(g, n, 1.0, 2 * n + 2));
    const GridMeasure mu = mu_grid(g, n, 1.0, 8 * n);
    for (double w : mu.weights) {
      CHECK(w > 0.0);
      CHECK(std::isfinite(w));
    }
  }

  TEST_CASE("total mass is resolved at eight points per frequency") {
    const std::size_t n = 2048;
    for (std::uint64_t i = 0; i < 5; ++i) {
      const auto g = gaussians(n, Seed(44, {i}));
      const double a = mu_grid(g, n, 1.0, 8 * n).total_mass();
      const double b = mu_grid(g, n, 1.0, 16 * n).total_mass();
      CHECK(std::abs(a - b) < 0.01 * b);
    }
  }

  TEST_CASE("discrete orthogonality under uniform weights") {
    const GridMeasure mu = uniform_measure(64);
    const cplx first = integrate(mu, [](double t) { return std::polar(1.0, t); });
    CHECK(std::abs(first) < 1e-12);
    const HermitianMatrix h = toeplitz_h(mu, 2);
    CHECK((h.matrix() - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-12);
  }

  TEST_CASE("toeplitz moment matrix of a chaos sample") {
    const std::size_t n = 512;
    const GridMeasure mu = mu_grid(gaussians(n, Seed(45)), n, 1.0, 8 * n);
    const HermitianMatrix h0 = toeplitz_h(mu, 0);
    CHECK(h0(0, 0).real() == mu.total_mass());
    const HermitianMatrix h = toeplitz_h(mu, 6);
    for (Eigen::Index k = 0; k < h.dim(); ++k) CHECK(h(k, k).real() == doctest::Approx(mu.total_mass()).epsilon(1e-14));
    CHECK(h.numerically_psd());
    CHECK(h.eigenvalues().minCoeff() >= -1e-10 * h.trace());
    CHECK_THROWS_AS(toeplitz_h(mu, 4 * n), ResolutionError);
  }

  TEST_CASE("hermitian square root") {
    const HermitianMatrix id(Eigen::MatrixXcd::Identity(4, 4));
    CHECK((herm_sqrt(id).matrix() - id.matrix()).norm() < 1e-14);
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 1.0;
    const HermitianMatrix root = herm_sqrt(HermitianMatrix(d));
    CHECK(std::abs(root(0, 0) - 2.0) < 1e-14);
    CHECK(std::abs(root(1, 1) - 1.0) < 1e-14);

    const std::size_t n = 256;
    const HermitianMatrix h = toeplitz_h(mu_grid(gaussians(n, Seed(46)), n, 1.0, 8 * n), 5);
    const HermitianMatrix s = herm_sqrt(h);
    CHECK((s.matrix() * s.matrix() - h.matrix()).norm() <= 1e-9 * h.matrix().norm());

    Eigen::MatrixXcd neg = Eigen::MatrixXcd::Zero(2, 2);
    neg(0, 0) = 1.0;
    neg(1, 1) = -1.0;
    CHECK_THROWS_AS(herm_sqrt(HermitianMatrix(neg)), NotPsdError);
    neg(1, 1) = -1e-12;
    CHECK_NOTHROW(herm_sqrt(HermitianMatrix(neg)));

    Eigen::MatrixXcd skew = Eigen::MatrixXcd::Zero(2, 2);
    skew(0, 1) = 1.0;
    CHECK_THROWS_AS(HermitianMatrix{skew}, DomainError);
  }

  TEST_CASE("parseval identity") {
    const Poly one{{1.0}};
    const HmcSample zero = sample_from_gaussians(std::vector<cplx>(33), 1.0);
    const ParsevalResult z = parseval_check(zero, 32, 1, one, 256, 1024);
    CHECK(z.lhs == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(z.rhs == doctest::Approx(1.0).epsilon(1e-14));

    const Poly p{{1.0, 1.0}};
    for (std::uint64_t i = 0; i < 5; ++i) {
      const HmcSample s = sample_coeffs(32, 0, 1.0, Seed(47, {i}));
      CHECK(parseval_check(s, 32, 1, p, 256, 1024).relative_error <= 1e-8);
      CHECK(parseval_tail_diagnostic(s, 32, 1, p, 256, 1024) <= 1e-6);
    }
    const HmcSample s = sample_coeffs(32, 0, 1.0, Seed(48));
    CHECK_THROWS_AS(parseval_check(s, 32, 1, p, 256, 514), ResolutionError);
    CHECK_NOTHROW(parseval_check(s, 32, 1, p, 256, 515));
  }
}
