#include "hmclab/series.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

#include "hmclab/errors.hpp"
#include "hmclab/fft.hpp"
#include "hmclab/parallel.hpp"

namespace hmclab {

GeneratorVec GeneratorVec::from_coefficients(std::span<const cplx> from_one) {
  GeneratorVec v;
  v.g_.reserve(from_one.size() + 1);
  v.g_.insert(v.g_.end(), from_one.begin(), from_one.end());
  return v;
}

GeneratorVec GeneratorVec::from_gaussians(std::span<const cplx> gaussians) {
  GeneratorVec v;
  if (gaussians.empty()) return v;
  v.g_.resize(gaussians.size());
  for (std::size_t k = 1; k < gaussians.size(); ++k) {
    v.g_[k] = gaussians[k] / std::sqrt(static_cast<double>(k));
  }
  return v;
}

GeneratorVec GeneratorVec::truncated(std::size_t cutoff) const {
  GeneratorVec v;
  const std::size_t keep = std::min(cutoff, degree());
  v.g_.assign(g_.begin(), g_.begin() + static_cast<std::ptrdiff_t>(keep + 1));
  return v;
}

namespace {

inline void mul_acc(double& re, double& im, cplx a, cplx b) noexcept {
  re += a.real() * b.real() - a.imag() * b.imag();
  im += a.real() * b.imag() + a.imag() * b.real();
}

// h_k = sqrt(theta) k g_k, padded with zeros to `size`.
std::vector<cplx> weighted_generator(const GeneratorVec& g, double theta, std::size_t n, std::size_t size) {
  std::vector<cplx> h(size);
  const double st = std::sqrt(theta);
  const std::size_t top = std::min(n, g.degree());
  for (std::size_t k = 1; k <= top; ++k) h[k] = st * static_cast<double>(k) * g[k];
  return h;
}

std::vector<cplx> exp_quadratic(const std::vector<cplx>& h, std::size_t n) {
  std::vector<cplx> c(n + 1);
  c[0] = 1.0;
  // Highest nonzero frequency bounds the inner loop.
  std::size_t top = 0;
  for (std::size_t k = std::min(n, h.size() - 1); k >= 1; --k) {
    if (h[k] != cplx{}) {
      top = k;
      break;
    }
  }
  const bool compensated = n >= (std::size_t{1} << 16);
  for (std::size_t m = 1; m <= n; ++m) {
    const std::size_t kmax = std::min(m, top);
    double re = 0.0;
    double im = 0.0;
    if (!compensated) {
      for (std::size_t k = 1; k <= kmax; ++k) mul_acc(re, im, h[k], c[m - k]);
    } else {
      double cre = 0.0;
      double cim = 0.0;
      for (std::size_t k = 1; k <= kmax; ++k) {
        const cplx t = h[k] * c[m - k];
        const double yr = t.real() - cre;
        const double tr = re + yr;
        cre = (tr - re) - yr;
        re = tr;
        const double yi = t.imag() - cim;
        const double ti = im + yi;
        cim = (ti - im) - yi;
        im = ti;
      }
    }
    c[m] = cplx(re, im) / static_cast<double>(m);
  }
  return c;
}

// Online (relaxed) evaluation of the same recursion. solve(l, r) finalizes
// c[l, r) assuming acc[l, r) already holds every contribution from c[0, l).
// The contribution of a left half to the right half is a middle product
// computed as a cyclic convolution of length r - l.
class RelaxedExp {
 public:
  RelaxedExp(std::vector<cplx> h, std::size_t n) : h_(std::move(h)), n_(n), c_(n + 1), acc_(n + 1) {}

  std::vector<cplx> run() {
    const std::size_t size = std::bit_ceil(n_ + 1);
    solve(0, size);
    return std::move(c_);
  }

 private:
  static constexpr std::size_t kLeaf = 64;

  void solve(std::size_t l, std::size_t r) {
    if (l > n_) return;
    const std::size_t hi = std::min(r, n_ + 1);
    if (r - l <= kLeaf) {
      leaf(l, hi);
      return;
    }
    const std::size_t mid = l + (r - l) / 2;
    solve(l, mid);
    if (mid < hi) contribute(l, mid, r, hi);
    solve(mid, r);
  }

  void leaf(std::size_t l, std::size_t hi) {
    for (std::size_t m = l; m < hi; ++m) {
      if (m == 0) {
        c_[0] = 1.0;
        continue;
      }
      double re = acc_[m].real();
      double im = acc_[m].imag();
      for (std::size_t j = l; j < m; ++j) mul_acc(re, im, h_[m - j], c_[j]);
      c_[m] = cplx(re, im) / static_cast<double>(m);
    }
  }

  void contribute(std::size_t l, std::size_t mid, std::size_t r, std::size_t hi) {
    const std::size_t half = mid - l;
    const std::size_t outputs = hi - mid;
    const std::size_t width = r - l;
    const double direct_cost = static_cast<double>(outputs) * static_cast<double>(half);
    const double fft_cost = 6.0 * static_cast<double>(width) * std::log2(static_cast<double>(width));
    if (direct_cost <= fft_cost) {
      for (std::size_t m = mid; m < hi; ++m) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t j = l; j < mid; ++j) mul_acc(re, im, h_[m - j], c_[j]);
        acc_[m] += cplx(re, im);
      }
      return;
    }
    const std::vector<cplx>& hhat = transformed_generator(width);
    buffer_.assign(width, cplx{});
    std::copy(c_.begin() + static_cast<std::ptrdiff_t>(l), c_.begin() + static_cast<std::ptrdiff_t>(mid),
              buffer_.begin());
    fft::transform(buffer_, fft::Direction::kForward);
    for (std::size_t i = 0; i < width; ++i) buffer_[i] *= hhat[i];
    fft::transform(buffer_, fft::Direction::kBackward);
    const double scale = 1.0 / static_cast<double>(width);
    for (std::size_t m = mid; m < hi; ++m) acc_[m] += buffer_[m - l] * scale;
  }

  const std::vector<cplx>& transformed_generator(std::size_t width) {
    auto it = hhat_.find(width);
    if (it != hhat_.end()) return it->second;
    std::vector<cplx> v(width);
    const std::size_t take = std::min(width, h_.size());
    std::copy(h_.begin(), h_.begin() + static_cast<std::ptrdiff_t>(take), v.begin());
    fft::transform(v, fft::Direction::kForward);
    return hhat_.emplace(width, std::move(v)).first->second;
  }

  std::vector<cplx> h_;
  std::size_t n_;
  std::vector<cplx> c_;
  std::vector<cplx> acc_;
  std::vector<cplx> buffer_;
  std::map<std::size_t, std::vector<cplx>> hhat_;
};

void check_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("theta must be positive and finite");
}

}  // namespace

CoeffVec exp_series(const GeneratorVec& g, double theta, std::size_t n, ExpMethod method) {
  check_theta(theta);
  if (method == ExpMethod::kAuto) {
    method = n >= kRelaxedFftThreshold ? ExpMethod::kRelaxedFft : ExpMethod::kQuadratic;
  }
  CoeffVec out;
  out.theta = theta;
  if (method == ExpMethod::kQuadratic) {
    out.coeffs = exp_quadratic(weighted_generator(g, theta, n, n + 1), n);
  } else {
    out.coeffs = RelaxedExp(weighted_generator(g, theta, n, std::bit_ceil(n + 1)), n).run();
  }
  return out;
}

cplx brute_force_coeff(const GeneratorVec& g, double theta, std::size_t n) {
  check_theta(theta);
  if (n > kBruteForceMaxDegree) throw SizeError("brute_force_coeff: degree above 14");
  const double st = std::sqrt(theta);
  std::vector<double> factorial(n + 1, 1.0);
  for (std::size_t i = 1; i <= n; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);

  // Depth-first over multiplicities m_k, k descending from n.
  cplx total{};
  auto visit = [&](auto&& self, std::size_t k, std::size_t remaining, cplx term) -> void {
    if (remaining == 0) {
      total += term;
      return;
    }
    if (k == 0) return;
    const cplx base = st * g[k];
    cplx power = 1.0;
    for (std::size_t m = 0; m * k <= remaining; ++m) {
      self(self, k - 1, remaining - m * k, term * power / factorial[m]);
      power *= base;
    }
  };
  visit(visit, n, n, cplx{1.0});
  return total;
}

CoeffVec restricted_exp(const GeneratorVec& g, double theta, std::size_t q, std::size_t s_max,
                        ExpMethod method) {
  if (q < 1) throw DomainError("restricted_exp: cutoff q must be at least 1");
  return exp_series(g.truncated(q), theta, s_max, method);
}

double recursion_residual(const GeneratorVec& g, double theta, const CoeffVec& c) {
  const double st = std::sqrt(theta);
  double worst = 0.0;
  for (std::size_t m = 1; m < c.coeffs.size(); ++m) {
    cplx sum{};
    for (std::size_t k = 1; k <= m; ++k) sum += static_cast<double>(k) * g[k] * c.coeffs[m - k];
    worst = std::max(worst, std::abs(static_cast<double>(m) * c.coeffs[m] - st * sum));
  }
  return worst;
}

std::vector<double> expected_sq_norm_table(std::size_t s_max, std::size_t q) {
  if (q < 1) throw DomainError("expected_sq_norm_dp: cutoff q must be at least 1");
  std::vector<double> a(s_max + 1);
  a[0] = 1.0;
  for (std::size_t m = 1; m <= s_max; ++m) {
    double sum = 0.0;
    for (std::size_t k = 1; k <= std::min(q, m); ++k) sum += a[m - k];
    a[m] = sum / static_cast<double>(m);
  }
  return a;
}

double expected_sq_norm_dp(std::size_t s, std::size_t q) { return expected_sq_norm_table(s, q).back(); }

std::vector<std::size_t> cycle_lengths(std::span<const std::uint32_t> perm) {
  std::vector<std::size_t> lengths;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t start = 0; start < perm.size(); ++start) {
    if (seen[start]) continue;
    std::size_t len = 0;
    for (std::size_t i = start; !seen[i]; i = perm[i]) {
      seen[i] = true;
      ++len;
    }
    lengths.push_back(len);
  }
  return lengths;
}

McEstimate cycle_probability_mc(std::size_t s, std::size_t q, CycleEvent event, std::size_t replicas,
                                const Seed& seed, unsigned workers) {
  if (s < 1) throw DomainError("cycle_probability_mc: order s must be at least 1");
  if (replicas < 1) throw DomainError("cycle_probability_mc: need at least one replica");
  const auto hits = parallel_map(replicas, workers, [&](std::size_t i) -> char {
    GaussianStream stream(seed.child(i));
    std::vector<std::uint32_t> perm(s);
    std::iota(perm.begin(), perm.end(), 0U);
    for (std::size_t j = s - 1; j > 0; --j) {
      std::swap(perm[j], perm[stream.next_index(j + 1)]);
    }
    const auto lengths = cycle_lengths(perm);
    if (event == CycleEvent::kAllCyclesAtMostQ) {
      return std::all_of(lengths.begin(), lengths.end(), [q](std::size_t l) { return l <= q; }) ? 1 : 0;
    }
    return std::all_of(lengths.begin(), lengths.end(), [q](std::size_t l) { return l > q; }) ? 1 : 0;
  });
  const double count = static_cast<double>(std::count(hits.begin(), hits.end(), 1));
  const double n = static_cast<double>(replicas);
  const double p = count / n;
  McEstimate est;
  est.mean = p;
  est.std_error = replicas > 1 ? std::sqrt(p * (1.0 - p) / (n - 1.0)) : 0.0;
  est.replicas = replicas;
  return est;
}

}  // namespace hmclab
