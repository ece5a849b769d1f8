#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "hmclab/dickman.hpp"
#include "hmclab/errors.hpp"
#include "hmclab/limitlaw.hpp"
#include "../support/oracles.hpp"

using namespace hmclab;

namespace {

const DickmanTable& table() {
  static const DickmanTable t = solve_rho();
  return t;
}

const double kEg = std::exp(-DickmanTable::gamma_e);

}  // namespace

TEST_SUITE("dickman") {
  TEST_CASE("closed forms on the first pieces") {
    CHECK(table().rho(0.5) == 1.0);
    CHECK(table().rho(1.0) == 1.0);
    CHECK(std::abs(table().rho(2.0) - (1.0 - std::log(2.0))) <= 1e-8);
    for (double x : {1.1, 1.37, 1.5, 1.999}) CHECK(std::abs(table().rho(x) - (1.0 - std::log(x))) <= 1e-10);
    for (double x : {2.0, 2.25, 2.5, 2.71, 3.0}) {
      CAPTURE(x);
      CHECK(std::abs(table().rho(x) - oracle::rho_2_3(x)) <= 1e-9);
    }
    CHECK(table().rho(3.0) == doctest::Approx(0.0486083882911316).epsilon(1e-9));
  }

  TEST_CASE("table invariants") {
    const auto& v = table().values();
    const double h = table().h();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (static_cast<double>(i) * h <= 1.0) REQUIRE(v[i] == 1.0);
      REQUIRE(v[i] > 0.0);
      if (i > 0) REQUIRE(v[i] <= v[i - 1]);
    }
    for (double x = 3.0; x <= 19.0; x += 0.5) CHECK(table().rho(x + 1.0) < 0.5 * table().rho(x));
    CHECK(table().rho(20.0) < 1e-28);
    CHECK(table().rho(10.0) == doctest::Approx(2.77017183772596e-11).epsilon(1e-8));
  }

  TEST_CASE("normalization and distribution function") {
    CHECK(std::abs(table().total_integral() - std::exp(DickmanTable::gamma_e)) <= 1e-6);
    CHECK(std::abs(table().cdf(1.0) - kEg) <= 1e-6);
    CHECK(table().cdf(0.0) == 0.0);
    CHECK(table().cdf(-1.0) == 0.0);
    CHECK(table().cdf(INFINITY) == 1.0);
    for (double x = 0.05; x < 8.0; x += 0.173) {
      CAPTURE(x);
      CHECK(std::abs(table().quantile(table().cdf(x)) - x) <= 1e-6);
    }
    CHECK_THROWS_AS((void)table().quantile(1.5), DomainError);
  }

  TEST_CASE("refinement stability") {
    const DickmanTable fine = solve_rho(5e-5, 20.0);
    CHECK(std::abs(fine.rho(20.0) - table().rho(20.0)) <= 1e-8);
    for (double x : {2.5, 4.0, 7.3}) CHECK(std::abs(fine.rho(x) - table().rho(x)) <= 1e-12);
  }

  TEST_CASE("step validation") {
    CHECK_THROWS_AS(solve_rho(0.0, 20.0), DomainError);
    CHECK_THROWS_AS(solve_rho(2e-3, 20.0), DomainError);
    CHECK_THROWS_AS(solve_rho(3e-4, 20.0), DomainError);
    CHECK_THROWS_AS(solve_rho(1e-3, 1.5), DomainError);
    CHECK_NOTHROW(solve_rho(1e-3, 2.0));
  }

  TEST_CASE("poisson representation") {
    constexpr std::size_t kDraws = 20000;
    std::vector<double> xs(kDraws), lap(kDraws);
    for (std::size_t i = 0; i < kDraws; ++i) {
      xs[i] = sample_x_poisson(1000, Seed(61, {i}));
      REQUIRE(xs[i] >= 0.0);
      lap[i] = std::exp(-xs[i]);
    }
    const auto m = oracle::moments(xs);
    CHECK(std::abs(m.mean - 1.0) < 3.0 * m.se);
    const auto l = oracle::moments(lap);
    CHECK(std::abs(l.mean - dickman_laplace(1.0)) < 3.0 * l.se);
    CHECK(ks_statistic(xs, [](double x) { return table().cdf(x); }).d <= 0.02);
    CHECK_THROWS_AS(sample_x_poisson(0, Seed(1)), DomainError);
  }

  TEST_CASE("inversion sampler") {
    GaussianStream s(Seed(62));
    std::vector<double> xs(20000);
    for (auto& x : xs) x = sample_x_inverse(table(), s);
    CHECK(ks_statistic(xs, [](double x) { return table().cdf(x); }).p_value > 0.001);
  }

  TEST_CASE("laplace transform closed form at s -> 0") {
    CHECK(dickman_laplace(0.0) == 1.0);
    CHECK(dickman_laplace(1e-8) == doctest::Approx(1.0 - 1e-8).epsilon(1e-12));
  }

  TEST_CASE("psi family") {
    for (std::size_t L : {2, 5, 30}) {
      for (std::size_t K = 1; K < L; ++K) {
        const double dl = static_cast<double>(L), dk = static_cast<double>(K);
        const double mid = std::exp(-(dl - dk - 0.5) / dk);
        CHECK(psi(L, K, mid) == doctest::Approx(1.0 / (1.0 + 1.0 / (2.0 * dk))));
        CHECK(psi(L, K, std::exp(-(dl - dk) / dk)) == 0.0);
        if (K + 1 < L) CHECK(psi(L, K, std::exp(-(dl - dk - 1.0) / dk) * 1.0001) == 0.0);
        for (int j = 0; j <= 400; ++j) {
          const double v = psi(L, K, j / 400.0);
          REQUIRE((v >= 0.0 && v <= 1.0));
        }
      }
    }
    CHECK(psi(2, 1, 1.0) == 0.5);
    CHECK_THROWS_AS(psi(3, 0, 0.5), DomainError);
    CHECK_THROWS_AS(psi(3, 3, 0.5), DomainError);
    CHECK_THROWS_AS(psi(3, 1, 1.5), DomainError);
  }

  TEST_CASE("sum over blocks and b(L)") {
    const double two = limit_dickman_sum(2, table());
    CHECK(std::abs(two - limit_dickman_sum_substituted(2, table())) <= 1e-8);
    CHECK(two == doctest::Approx(kEg * std::log(2.0)).epsilon(1e-12));
    for (std::size_t L : {7, 33}) {
      CHECK(std::abs(limit_dickman_sum(L, table()) - limit_dickman_sum_substituted(L, table())) <= 1e-8);
    }
    const double gap10 = std::abs(limit_dickman_sum(10, table()) - kEg);
    const double gap100 = std::abs(limit_dickman_sum(100, table()) - kEg);
    CHECK(gap100 <= 0.05);
    CHECK(gap100 < gap10);
    CHECK(std::abs(b_of_l(100, table()) - 1.0) <= 0.03);
    CHECK(std::abs(b_of_l(100, table()) - 1.0) < std::abs(b_of_l(10, table()) - 1.0));
    const double b = b_of_l(17, table());
    CHECK(b * b * kEg == doctest::Approx(limit_dickman_sum(17, table())).epsilon(1e-14));
    CHECK_THROWS_AS(limit_dickman_sum(1, table()), DomainError);
  }

  TEST_CASE("reciprocal integral equals one") {
    CHECK(std::abs(rho_reciprocal_integral(table()) - 1.0) <= 1e-6);
  }

  TEST_CASE("table export") {
    const auto path = (std::filesystem::temp_directory_path() / "hmclab_rho_test.csv").string();
    write_rho_csv(table(), path, 1000);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,rho");
    std::getline(in, line);
    CHECK(line == "0,1");
    std::size_t rows = 1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 201);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(write_rho_csv(table(), "/nonexistent-dir/x.csv"), IoError);
  }
}
