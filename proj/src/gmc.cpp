#include "hmclab/gmc.hpp"

#include <algorithm>
#include <cmath>

#include "hmclab/errors.hpp"
#include "hmclab/fft.hpp"

namespace hmclab {
namespace {

void check_radius(double r) {
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("radius must lie in (0, 1]");
}

}  // namespace

double v_n(Cutoff n, double r) {
  check_radius(r);
  if (n.is_infinite()) {
    if (r == 1.0) throw DomainError("v_n: (infinite, 1) is excluded");
    return -2.0 * std::log1p(-r * r);
  }
  double sum = 0.0;
  for (std::size_t l = n.value(); l >= 1; --l) {
    sum += std::pow(r, 2.0 * static_cast<double>(l)) / static_cast<double>(l);
  }
  return 2.0 * sum;
}

double circle_distance(double x) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double y = std::fmod(std::abs(x), two_pi);
  return std::min(y, two_pi - y);
}

double covariance(Cutoff n, double r, double delta) {
  check_radius(r);
  if (n.is_infinite()) {
    if (r == 1.0 && circle_distance(delta) == 0.0) {
      throw DomainError("covariance: (infinite, 1, 0) is excluded");
    }
    const double r2 = r * r;
    const double re = 1.0 - r2 * std::cos(delta);
    const double im = -r2 * std::sin(delta);
    return -std::log(re * re + im * im);
  }
  double sum = 0.0;
  for (std::size_t l = n.value(); l >= 1; --l) {
    const double dl = static_cast<double>(l);
    sum += std::pow(r, 2.0 * dl) / dl * std::cos(dl * delta);
  }
  return 2.0 * sum;
}

double GridMeasure::total_mass() const noexcept {
  double acc = 0.0;
  for (double w : weights) acc += w;
  return acc;
}

std::vector<double> field_on_grid(std::span<const cplx> gaussians, std::size_t n, double r, std::size_t m_points) {
  if (gaussians.size() < n + 1) throw SizeError("field_on_grid: fewer than n Gaussians");
  if (m_points <= n) throw ResolutionError("field_on_grid: grid must exceed the cutoff");
  std::vector<cplx> buf(m_points);
  for (std::size_t l = 1; l <= n; ++l) {
    const double dl = static_cast<double>(l);
    buf[l] = std::pow(r, dl) / std::sqrt(dl) * gaussians[l];
  }
  fft::transform(buf, fft::Direction::kBackward);
  std::vector<double> field(m_points);
  for (std::size_t j = 0; j < m_points; ++j) field[j] = 2.0 * buf[j].real();
  return field;
}

double field_direct(std::span<const cplx> gaussians, std::size_t n, double r, double angle) {
  if (gaussians.size() < n + 1) throw SizeError("field_direct: fewer than n Gaussians");
  cplx acc{};
  for (std::size_t l = 1; l <= n; ++l) {
    const double dl = static_cast<double>(l);
    acc += std::pow(r, dl) / std::sqrt(dl) * std::polar(1.0, dl * angle) * gaussians[l];
  }
  return 2.0 * acc.real();
}

GridMeasure mu_grid(std::span<const cplx> gaussians, std::size_t n, double r, std::size_t m_points) {
  check_radius(r);
  if (n < 1) throw DomainError("mu_grid: cutoff must be at least 1");
  if (m_points < 2 * n + 2) throw ResolutionError("mu_grid: need at least 2n + 2 grid points");
  const std::vector<double> field = field_on_grid(gaussians, n, r, m_points);
  const double v = v_n(Cutoff::finite(n), r);
  const double log_prefactor = 0.5 * std::log(0.5 * v) - 0.5 * v - std::log(static_cast<double>(m_points));
  GridMeasure mu;
  mu.m_points = m_points;
  mu.n = n;
  mu.r = r;
  mu.weights.resize(m_points);
  for (std::size_t j = 0; j < m_points; ++j) mu.weights[j] = std::exp(log_prefactor + field[j]);
  return mu;
}

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DomainError("HermitianMatrix: matrix must be square");
  const double scale = std::max(1.0, m_.norm());
  if ((m_ - m_.adjoint()).norm() > 1e-12 * scale) throw DomainError("HermitianMatrix: matrix is not Hermitian");
}

Eigen::VectorXd HermitianMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

bool HermitianMatrix::numerically_psd() const {
  if (m_.size() == 0) return true;
  return eigenvalues().minCoeff() >= -kPsdClampRelative * std::abs(trace());
}

HermitianMatrix toeplitz_h(const GridMeasure& measure, std::size_t ell) {
  if (2 * ell >= measure.m_points) throw ResolutionError("toeplitz_h: need 2 ell < M");
  std::vector<cplx> moments(ell + 1);
  for (std::size_t d = 0; d <= ell; ++d) {
    const double dd = static_cast<double>(d);
    moments[d] = integrate(measure, [dd](double t) { return std::polar(1.0, dd * t); });
  }
  const auto dim = static_cast<Eigen::Index>(ell + 1);
  Eigen::MatrixXcd h(dim, dim);
  for (Eigen::Index k1 = 0; k1 < dim; ++k1) {
    for (Eigen::Index k2 = 0; k2 < dim; ++k2) {
      h(k1, k2) = k2 >= k1 ? moments[static_cast<std::size_t>(k2 - k1)]
                           : std::conj(moments[static_cast<std::size_t>(k1 - k2)]);
    }
  }
  return HermitianMatrix(std::move(h));
}

HermitianMatrix herm_sqrt(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.matrix());
  Eigen::VectorXd lambda = solver.eigenvalues();
  const double floor = -kPsdClampRelative * std::abs(lambda.sum());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < floor) throw NotPsdError("herm_sqrt: eigenvalue below the PSD clamp threshold");
    lambda(i) = std::sqrt(std::max(lambda(i), 0.0));
  }
  const Eigen::MatrixXcd& v = solver.eigenvectors();
  Eigen::MatrixXcd root = v * lambda.cast<cplx>().asDiagonal() * v.adjoint();
  root = 0.5 * (root + root.adjoint()).eval();
  return HermitianMatrix(std::move(root));
}

namespace {

struct ParsevalParts {
  double lhs = 0.0;
  double rhs = 0.0;
  double exp_field = 0.0;
};

ParsevalParts parseval_parts(const HmcSample& sample, std::size_t u, std::size_t m, const Poly& p,
                             std::size_t s_max, std::size_t m_points, bool with_exp_field) {
  if (u < 1) throw DomainError("parseval_check: cutoff u must be at least 1");
  if (sample.gaussians.size() < u + 1) throw SizeError("parseval_check: sample holds fewer than u Gaussians");
  const std::size_t d = p.degree();
  if (m_points <= 2 * (s_max + d)) throw ResolutionError("parseval_check: need M > 2 (s_max + deg p)");

  const double theta = sample.theta();
  const auto g = GeneratorVec::from_gaussians(sample.gaussians);
  const CoeffVec table = restricted_exp(g, theta, u, s_max);
  const double du = static_cast<double>(u);
  const double dm = static_cast<double>(m);
  auto coeff = [&](std::ptrdiff_t k) -> cplx {
    return (k < 0 || k > static_cast<std::ptrdiff_t>(s_max)) ? cplx{} : table[static_cast<std::size_t>(k)];
  };

  ParsevalParts out;
  for (std::ptrdiff_t s = -static_cast<std::ptrdiff_t>(d); s <= static_cast<std::ptrdiff_t>(s_max); ++s) {
    cplx t{};
    for (std::size_t r = 0; r <= d && r < p.a.size(); ++r) t += p.a[r] * coeff(s + static_cast<std::ptrdiff_t>(r));
    out.lhs += std::exp(-static_cast<double>(s) * dm / du) * std::norm(t);
  }

  std::vector<cplx> f(m_points);
  for (std::size_t s = 0; s <= s_max; ++s) {
    f[s] = table[s] * std::exp(-static_cast<double>(s) * dm / (2.0 * du));
  }
  fft::transform(f, fft::Direction::kBackward);

  std::vector<double> field;
  if (with_exp_field) {
    const double radius = std::exp(-dm / (2.0 * du));
    field = field_on_grid(sample.gaussians, u, radius, m_points);
  }
  const double stretch = std::exp(dm / (2.0 * du));
  const double st = std::sqrt(theta);
  const auto big_m = static_cast<double>(m_points);
  for (std::size_t j = 0; j < m_points; ++j) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / big_m;
    const double weight = std::norm(p(std::polar(stretch, -t)));
    out.rhs += weight * std::norm(f[j]);
    if (with_exp_field) out.exp_field += weight * std::exp(st * field[j]);
  }
  out.rhs /= big_m;
  out.exp_field /= big_m;
  return out;
}

}  // namespace

ParsevalResult parseval_check(const HmcSample& sample, std::size_t u, std::size_t m, const Poly& p,
                              std::size_t s_max, std::size_t m_points) {
  const ParsevalParts parts = parseval_parts(sample, u, m, p, s_max, m_points, false);
  ParsevalResult res;
  res.lhs = parts.lhs;
  res.rhs = parts.rhs;
  const double scale = std::max(std::abs(parts.lhs), std::abs(parts.rhs));
  res.relative_error = scale > 0.0 ? std::abs(parts.lhs - parts.rhs) / scale : 0.0;
  return res;
}

double parseval_tail_diagnostic(const HmcSample& sample, std::size_t u, std::size_t m, const Poly& p,
                                std::size_t s_max, std::size_t m_points) {
  const ParsevalParts parts = parseval_parts(sample, u, m, p, s_max, m_points, true);
  return std::abs(parts.exp_field - parts.rhs) / std::max(parts.rhs, 1e-300);
}

}  // namespace hmclab
