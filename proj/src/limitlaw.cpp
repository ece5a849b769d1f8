#include "hmclab/limitlaw.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hmclab/errors.hpp"

namespace hmclab {
namespace {

constexpr int kKolmogorovTerms = 100;

double ks_p_value(double d, double n_eff) {
  const double root = std::sqrt(n_eff);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

LimitSample sample_limit(GaussianStream& stream) {
  LimitSample s;
  const double e = std::sqrt(std::numbers::pi) * stream.next_standard_exponential();
  s.m1 = 1.0 / e;
  s.z = stream.next_complex_gaussian();
  s.w = std::sqrt(s.m1) * s.z;
  return s;
}

LimitSample sample_limit(const Seed& seed) {
  GaussianStream stream(seed);
  return sample_limit(stream);
}

double moment_formula(double q) {
  if (!(q > 0.0 && q < 2.0)) throw DomainError("moment_formula: q must lie in (0, 2)");
  const double half = 0.5 * std::numbers::pi * q;
  return std::pow(std::numbers::pi, -0.25 * q) * half / std::sin(half);
}

double tail_formula(double y) {
  if (!(y >= 0.0)) throw DomainError("tail_formula: y must be nonnegative");
  if (std::isinf(y)) return 0.0;
  return 1.0 / (1.0 + y * y * std::sqrt(std::numbers::pi));
}

double tail_upper_bound(double n, double y, double c) {
  if (!(n >= 2.0)) throw DomainError("tail_upper_bound: n must be at least 2");
  if (!(y >= 2.0)) throw DomainError("tail_upper_bound: y must be at least 2");
  return c * std::min(std::sqrt(std::log(n)), std::log(y)) / (y * y);
}

double moment_from_tail(double q) {
  if (!(q > 0.0 && q < 2.0)) throw DomainError("moment_from_tail: q must lie in (0, 2)");
  const double sp = std::sqrt(std::numbers::pi);
  auto density = [q, sp](double y) {
    if (y <= 1.0) {
      const double den = 1.0 + sp * y * y;
      return std::pow(y, q) * 2.0 * sp * y / (den * den);
    }
    const double den = 1.0 / (y * y) + sp;
    return 2.0 * sp * std::pow(y, q - 3.0) / (den * den);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(density, 1e-14);
}

double ratio_cdf(double x) { return x <= 0.0 ? 0.0 : (std::isinf(x) ? 1.0 : x / (1.0 + x)); }

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.0) {
    // Theta-function form converges fast for small lambda.
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= kKolmogorovTerms; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * c);
      sum += term;
      if (term < 1e-300) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= kKolmogorovTerms; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 10) throw DomainError("ks_statistic: need at least 10 samples");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 10 || b.size() < 10) throw DomainError("ks_two_sample: need at least 10 samples per side");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

void to_json(nlohmann::json& j, const TestReport& r) {
  j = nlohmann::json{{"name", r.name},           {"sample_size", r.sample_size}, {"value", r.value},
                     {"reference", r.reference}, {"se_or_p", r.se_or_p},         {"pass", r.pass}};
}

void from_json(const nlohmann::json& j, TestReport& r) {
  j.at("name").get_to(r.name);
  j.at("sample_size").get_to(r.sample_size);
  j.at("value").get_to(r.value);
  j.at("reference").get_to(r.reference);
  j.at("se_or_p").get_to(r.se_or_p);
  j.at("pass").get_to(r.pass);
}

MeanSe mean_se(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("mean_se: empty input");
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, std::numeric_limits<double>::infinity()};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw DomainError("quantile: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: probability outside [0, 1]");
  const double pos = p * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(lo), xs.end());
  const double x_lo = xs[lo];
  if (hi == lo) return x_lo;
  const double x_hi = *std::min_element(xs.begin() + static_cast<std::ptrdiff_t>(hi), xs.end());
  return x_lo + (pos - static_cast<double>(lo)) * (x_hi - x_lo);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

double bootstrap_se(std::span<const double> xs, const std::function<double(std::vector<double>)>& statistic,
                    std::size_t resamples, const Seed& seed) {
  if (xs.empty()) throw DomainError("bootstrap_se: empty input");
  if (resamples < 2) throw DomainError("bootstrap_se: need at least 2 resamples");
  std::vector<double> stats(resamples);
  std::vector<double> buf(xs.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    GaussianStream stream(seed.child(b));
    for (auto& v : buf) v = xs[stream.next_index(xs.size())];
    stats[b] = statistic(buf);
  }
  double mean = 0.0;
  for (double s : stats) mean += s;
  mean /= static_cast<double>(resamples);
  double ss = 0.0;
  for (double s : stats) ss += (s - mean) * (s - mean);
  return std::sqrt(ss / static_cast<double>(resamples - 1));
}

Eigen::VectorXcd sample_with_root(const HermitianMatrix& root, GaussianStream& stream) {
  Eigen::VectorXcd z(root.dim());
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = stream.next_complex_gaussian();
  return root.matrix() * z;
}

Eigen::VectorXcd toeplitz_limit_sampler(const HermitianMatrix& h, GaussianStream& stream) {
  return sample_with_root(herm_sqrt(h), stream);
}

Eigen::VectorXcd toeplitz_limit_sampler(const HermitianMatrix& h, const Seed& seed) {
  GaussianStream stream(seed);
  return toeplitz_limit_sampler(h, stream);
}

}  // namespace hmclab
