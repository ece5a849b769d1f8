#include "hmclab/dickman.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>

#include "hmclab/errors.hpp"

namespace hmclab {
namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

// Integral over [x_i, x_{i+1}] of the cubic through four equispaced nodes,
// for the three stencil placements.
constexpr double kCentered[4] = {-1.0 / 24, 13.0 / 24, 13.0 / 24, -1.0 / 24};  // i-1..i+2
constexpr double kForward[4] = {9.0 / 24, 19.0 / 24, -5.0 / 24, 1.0 / 24};     // i..i+3
constexpr double kBackward[4] = {1.0 / 24, -5.0 / 24, 19.0 / 24, 9.0 / 24};    // i-2..i+1

// One-step integral of samples f[.] over [i, i+1], with the stencil kept
// inside [piece_lo, piece_hi].
template <class F>
double step_integral(F&& f, std::size_t i, std::size_t piece_lo, std::size_t piece_hi, double h) {
  if (i >= piece_lo + 1 && i + 2 <= piece_hi) {
    return h * (kCentered[0] * f(i - 1) + kCentered[1] * f(i) + kCentered[2] * f(i + 1) + kCentered[3] * f(i + 2));
  }
  if (i < piece_lo + 1) {
    return h * (kForward[0] * f(i) + kForward[1] * f(i + 1) + kForward[2] * f(i + 2) + kForward[3] * f(i + 3));
  }
  return h * (kBackward[0] * f(i - 2) + kBackward[1] * f(i - 1) + kBackward[2] * f(i) + kBackward[3] * f(i + 1));
}

// Integrates f over [a, b] with Gauss-Legendre panels that break at integers
// (where rho loses smoothness) and are at most 1/8 wide.
template <class F>
double piecewise_gauss(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  double left = a;
  while (left < b) {
    const double next_int = std::floor(left) + 1.0;
    const double right = std::min({b, next_int, left + 0.125});
    total += Gauss::integrate(f, left, right);
    left = right;
  }
  return total;
}

}  // namespace

DickmanTable::DickmanTable(double h, double x_max, std::vector<double> values, std::vector<double> running_integral)
    : h_(h),
      x_max_(x_max),
      per_unit_(static_cast<std::size_t>(std::llround(1.0 / h))),
      values_(std::move(values)),
      running_(std::move(running_integral)) {}

double DickmanTable::rho_derivative(double x) const {
  if (x < 1.0) return 0.0;
  if (x > x_max_) return 0.0;
  return -rho(x - 1.0) / x;
}

double DickmanTable::rho(double x) const {
  if (x <= 1.0) return x >= 0.0 ? 1.0 : 0.0;
  if (x >= x_max_) return x == x_max_ ? values_.back() : 0.0;
  const double pos = x / h_;
  auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= values_.size()) i = values_.size() - 2;
  const double t = pos - static_cast<double>(i);
  const double x0 = static_cast<double>(i) * h_;
  const double x1 = x0 + h_;
  const double y0 = values_[i];
  const double y1 = values_[i + 1];
  // Right derivative at the left node (matters only at x0 = 1).
  const double d0 = x0 >= 1.0 - 0.5 * h_ ? -rho(x0 - 1.0) / x0 : 0.0;
  const double d1 = -rho(x1 - 1.0) / x1;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h_ * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h_ * d1;
}

double DickmanTable::integral(double x) const {
  if (x <= 0.0) return 0.0;
  if (x <= 1.0) return x;
  if (x >= x_max_) return running_.back();
  const double pos = x / h_;
  auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= values_.size()) i = values_.size() - 2;
  const double t = pos - static_cast<double>(i);
  const double x0 = static_cast<double>(i) * h_;
  // Integral of the Hermite cubic for rho over [x0, x0 + t h].
  const double y0 = values_[i];
  const double y1 = values_[i + 1];
  const double d0 = x0 >= 1.0 - 0.5 * h_ ? -rho(x0 - 1.0) / x0 : 0.0;
  const double d1 = -rho(x0 + h_ - 1.0) / (x0 + h_);
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t3 * t;
  const double piece = h_ * ((0.5 * t4 - t3 + t) * y0 + (0.25 * t4 - 2.0 / 3.0 * t3 + 0.5 * t2) * h_ * d0 +
                             (-0.5 * t4 + t3) * y1 + (0.25 * t4 - 1.0 / 3.0 * t3) * h_ * d1);
  return running_[i] + piece;
}

double DickmanTable::cdf(double x) const {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return std::min(1.0, std::exp(-gamma_e) * integral(x));
}

double DickmanTable::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: probability outside [0, 1]");
  if (p <= 0.0) return 0.0;
  const double target = p * std::exp(gamma_e);
  if (target <= 1.0) return target;
  if (target >= running_.back()) return x_max_;
  const auto it = std::upper_bound(running_.begin(), running_.end(), target);
  const auto hi_idx = static_cast<std::size_t>(it - running_.begin());
  double lo = static_cast<double>(hi_idx - 1) * h_;
  double hi = static_cast<double>(hi_idx) * h_;
  for (int iter = 0; iter < 60 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (integral(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// Past x = 5 the table continues with x rho(x) = integral of rho over
// [x-1, x] (extended Simpson weights). The differential form keeps an
// absolute error near 1e-16 that would swamp rho beyond x ~ 12; this
// positive average keeps the error relative.
constexpr std::size_t kIntegralFormStart = 5;
constexpr std::size_t kBlock = 64;

void continue_by_window_average(std::vector<double>& rho, std::size_t from, std::size_t per_unit, double step) {
  const std::size_t last = rho.size() - 1;
  if (from >= last) return;
  static constexpr double kEnd[4] = {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};
  std::vector<double> block_sums;
  auto seal_blocks = [&](std::size_t known) {
    while ((block_sums.size() + 1) * kBlock <= known + 1) {
      const std::size_t lo = block_sums.size() * kBlock;
      double s = 0.0;
      for (std::size_t j = lo; j < lo + kBlock; ++j) s += rho[j];
      block_sums.push_back(s);
    }
  };
  auto range_sum = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    std::size_t j = a;
    while (j <= b && j % kBlock != 0) s += rho[j++];
    while (j + kBlock - 1 <= b) s += block_sums[j / kBlock], j += kBlock;
    while (j <= b) s += rho[j++];
    return s;
  };
  for (std::size_t i = from + 1; i <= last; ++i) {
    seal_blocks(i - 1);
    const std::size_t a = i - per_unit;
    double w = kEnd[0] * rho[a] + kEnd[1] * rho[a + 1] + kEnd[2] * rho[a + 2] + kEnd[3] * rho[a + 3];
    w += kEnd[3] * rho[i - 3] + kEnd[2] * rho[i - 2] + kEnd[1] * rho[i - 1];
    w += range_sum(a + 4, i - 4);
    rho[i] = step * w / (static_cast<double>(i) * step - kEnd[0] * step);
  }
}

}  // namespace

DickmanTable solve_rho(double h, double x_max) {
  if (!(h > 0.0 && h <= 1e-3)) throw DomainError("solve_rho: step must satisfy 0 < h <= 1e-3");
  const double inv = 1.0 / h;
  const auto per_unit = static_cast<std::size_t>(std::llround(inv));
  if (std::abs(inv - static_cast<double>(per_unit)) > 1e-6 * inv) {
    throw DomainError("solve_rho: 1/h must be an integer so unit points are grid nodes");
  }
  if (!(x_max >= 2.0)) throw DomainError("solve_rho: x_max must be at least 2");
  const auto last = static_cast<std::size_t>(std::llround(x_max * static_cast<double>(per_unit)));
  const double step = 1.0 / static_cast<double>(per_unit);

  std::vector<double> rho(last + 1, 1.0);
  auto delayed = [&](std::size_t j) { return rho[j - per_unit] / (static_cast<double>(j) * step); };
  const std::size_t switch_at = std::min(last, kIntegralFormStart * per_unit);
  for (std::size_t i = per_unit; i < switch_at; ++i) {
    const std::size_t piece_lo = (i / per_unit) * per_unit;
    rho[i + 1] = rho[i] - step_integral(delayed, i, piece_lo, piece_lo + per_unit, step);
  }
  continue_by_window_average(rho, switch_at, per_unit, step);

  std::vector<double> running(last + 1, 0.0);
  auto value = [&](std::size_t j) { return rho[j]; };
  for (std::size_t i = 0; i < last; ++i) {
    const std::size_t piece_lo = (i / per_unit) * per_unit;
    const std::size_t piece_hi = std::min(piece_lo + per_unit, last);
    running[i + 1] = running[i] + step_integral(value, i, piece_lo, piece_hi, step);
  }
  return DickmanTable(step, static_cast<double>(last) * step, std::move(rho), std::move(running));
}

void write_rho_csv(const DickmanTable& table, const std::string& path, std::size_t stride) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  stride = std::max<std::size_t>(stride, 1);
  out << "x,rho\n" << std::setprecision(17);
  const auto& v = table.values();
  for (std::size_t i = 0; i < v.size(); i += stride) out << static_cast<double>(i) * table.h() << ',' << v[i] << '\n';
  if (!out) throw IoError("write failed for " + path);
}

double sample_x_poisson(std::size_t u, GaussianStream& stream) {
  if (u < 1) throw DomainError("sample_x_poisson: u must be at least 1");
  double sum = 0.0;
  for (std::size_t l = 1; l <= u; ++l) {
    const double dl = static_cast<double>(l);
    sum += dl * static_cast<double>(stream.next_poisson(1.0 / dl));
  }
  return sum / static_cast<double>(u);
}

double sample_x_poisson(std::size_t u, const Seed& seed) {
  GaussianStream stream(seed);
  return sample_x_poisson(u, stream);
}

double sample_x_inverse(const DickmanTable& table, GaussianStream& stream) {
  return table.quantile(stream.next_uniform());
}

double psi(std::size_t L, std::size_t K, double x) {
  if (K < 1 || K + 1 > L) throw DomainError("psi: need 1 <= K <= L - 1");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("psi: x must lie in [0, 1]");
  const double dl = static_cast<double>(L);
  const double dk = static_cast<double>(K);
  const double lower = std::exp(-(dl - dk) / dk);
  const double upper = std::exp(-(dl - dk - 1.0) / dk);
  if (!(x > lower && x <= upper)) return 0.0;
  return 1.0 / (dl / dk + std::log(x));
}

double limit_dickman_sum(std::size_t L, const DickmanTable& table) {
  if (L < 2) throw DomainError("limit_dickman_sum: L must be at least 2");
  const double dl = static_cast<double>(L);
  double total = 0.0;
  for (std::size_t K = 1; K < L; ++K) {
    const double dk = static_cast<double>(K);
    const double a = (dl - dk - 1.0) / dk;
    const double b = std::min((dl - dk) / dk, table.x_max());
    total += piecewise_gauss([&](double y) { return table.rho(y) / (dl / dk - y); }, a, b);
  }
  return std::exp(-DickmanTable::gamma_e) * total;
}

double limit_dickman_sum_substituted(std::size_t L, const DickmanTable& table) {
  if (L < 2) throw DomainError("limit_dickman_sum: L must be at least 2");
  const double dl = static_cast<double>(L);
  double total = 0.0;
  for (std::size_t K = 1; K < L; ++K) {
    const double dk = static_cast<double>(K);
    auto f = [&](double t) { return table.rho((dl - dk - t) / dk) / (dk + t); };
    // rho((L-K-t)/K) is non-smooth where (L-K-t)/K is an integer.
    std::vector<double> cuts{0.0, 1.0};
    for (double j = std::ceil((dl - dk - 1.0) / dk); j <= (dl - dk) / dk; j += 1.0) {
      const double t = dl - dk - j * dk;
      if (t > 0.0 && t < 1.0) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double lo = cuts[i];
      const double hi = cuts[i + 1];
      const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) * 8.0 / std::max(1.0, 1.0 / dk))));
      for (int p = 0; p < panels; ++p) {
        const double a = lo + (hi - lo) * p / panels;
        const double b = lo + (hi - lo) * (p + 1) / panels;
        total += Gauss::integrate(f, a, b);
      }
    }
  }
  return std::exp(-DickmanTable::gamma_e) * total;
}

double b_of_l(std::size_t L, const DickmanTable& table) {
  return std::sqrt(std::exp(DickmanTable::gamma_e) * limit_dickman_sum(L, table));
}

double rho_reciprocal_integral(const DickmanTable& table) {
  // v in [1/(k+1), 1/k] maps to x = (1-v)/v in [k-1, k].
  double total = 0.0;
  const auto kmax = static_cast<std::size_t>(std::ceil(table.x_max()));
  auto f = [&](double v) { return table.rho((1.0 - v) / v) / v; };
  for (std::size_t k = 1; k <= kmax; ++k) {
    const double lo = 1.0 / static_cast<double>(k + 1);
    const double hi = 1.0 / static_cast<double>(k);
    constexpr int kPanels = 16;
    for (int p = 0; p < kPanels; ++p) {
      total += Gauss::integrate(f, lo + (hi - lo) * p / kPanels, lo + (hi - lo) * (p + 1) / kPanels);
    }
  }
  return total;
}

double dickman_laplace(double s) {
  auto f = [s](double t) { return t == 0.0 ? s : -std::expm1(-s * t) / t; };
  return std::exp(-Gauss::integrate(f, 0.0, 1.0));
}

}  // namespace hmclab
