#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hmclab/gmc.hpp"
#include "hmclab/rng.hpp"
#include "hmclab/series.hpp"

namespace hmclab {

/// One draw of the limit object sqrt(M1) Z.
struct LimitSample {
  double m1 = 0.0;  ///< 1/E with E exponential of mean sqrt(pi)
  cplx z;           ///< standard complex Gaussian
  cplx w;           ///< sqrt(m1) z
};

LimitSample sample_limit(GaussianStream& stream);
LimitSample sample_limit(const Seed& seed);

/// Limit of E((log n)^{1/4} |c_n|)^q: pi^{-q/4} (pi q/2) / sin(pi q/2).
/// DomainError outside 0 < q < 2.
double moment_formula(double q);

/// Limit of P((log n)^{1/4} |c_n| >= y) = 1/(1 + y^2 sqrt(pi)).
double tail_formula(double y);

/// c min(sqrt(log n), log y) / y^2; DomainError unless n >= 2 and y >= 2.
double tail_upper_bound(double n, double y, double c = 10.0);

/// integral_0^inf y^q d(-tail_formula)(y) by double-exponential quadrature.
double moment_from_tail(double q);

/// x/(1+x) for x >= 0: the CDF of a ratio of two independent Exp(1).
double ratio_cdf(double x);

struct KsResult {
  double d = 0.0;
  double p_value = 1.0;
};

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

/// One-sample KS distance with asymptotic p-value. DomainError for fewer
/// than 10 samples.
KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Two-sample KS distance with asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct TestReport {
  std::string name;
  std::size_t sample_size = 0;
  double value = 0.0;
  double reference = 0.0;
  double se_or_p = 0.0;
  bool pass = false;
};

void to_json(nlohmann::json& j, const TestReport& r);
void from_json(const nlohmann::json& j, TestReport& r);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and its standard error (n - 1 denominator).
MeanSe mean_se(std::span<const double> xs);

/// Linear-interpolation quantile (R type 7); DomainError for empty input.
double quantile(std::vector<double> xs, double p);
double median(std::vector<double> xs);

/// Standard error of `statistic` by nonparametric bootstrap.
double bootstrap_se(std::span<const double> xs, const std::function<double(std::vector<double>)>& statistic,
                    std::size_t resamples, const Seed& seed);

/// sqrt(h) (Z_0..Z_ell) with i.i.d. standard complex Z_k.
Eigen::VectorXcd toeplitz_limit_sampler(const HermitianMatrix& h, GaussianStream& stream);
Eigen::VectorXcd toeplitz_limit_sampler(const HermitianMatrix& h, const Seed& seed);

/// Same draw given a precomputed root (avoids repeating the eigensolve).
Eigen::VectorXcd sample_with_root(const HermitianMatrix& root, GaussianStream& stream);

}  // namespace hmclab
