#include "hmclab/hmc.hpp"

#include <cmath>
#include <numbers>

#include "hmclab/errors.hpp"

namespace hmclab {

HmcSample sample_coeffs(std::size_t n, std::size_t d, double theta, GaussianStream& stream,
                        ExpMethod method) {
  if (n < 1) throw DomainError("sample_coeffs: n must be at least 1");
  std::vector<cplx> gaussians(n + d + 1);
  stream.fill_complex_gaussian(gaussians.data() + 1, n + d);
  return sample_from_gaussians(std::move(gaussians), theta, method);
}

HmcSample sample_coeffs(std::size_t n, std::size_t d, double theta, const Seed& seed, ExpMethod method) {
  GaussianStream stream(seed);
  return sample_coeffs(n, d, theta, stream, method);
}

HmcSample sample_from_gaussians(std::vector<cplx> gaussians, double theta, ExpMethod method) {
  if (gaussians.empty()) gaussians.resize(1);
  gaussians[0] = cplx{};
  HmcSample s;
  const std::size_t top = gaussians.size() - 1;
  s.coeffs = exp_series(GeneratorVec::from_gaussians(gaussians), theta, top, method);
  s.gaussians = std::move(gaussians);
  return s;
}

void SplitConfig::validate() const {
  if (L < 2) throw DomainError("SplitConfig: L must be at least 2");
  if (n < L) throw DomainError("SplitConfig: n must be at least L");
}

namespace {

void require_gaussians(const HmcSample& sample, const SplitConfig& cfg) {
  cfg.validate();
  if (sample.gaussians.size() < cfg.n + cfg.r + 1 || sample.coeffs.coeffs.size() < cfg.n + cfg.r + 1) {
    throw SizeError("split: sample does not hold Gaussians up to index n + r");
  }
}

// Block index K with floor(Kn/L) < q <= floor((K+1)n/L), or 0 if q is in no
// good block.
std::size_t block_of(const SplitConfig& cfg, std::size_t q) {
  if (q <= cfg.edge(1) || q > cfg.n) return 0;
  // Smallest K+1 with q <= floor((K+1) n / L).
  std::size_t K = (q * cfg.L) / cfg.n;
  while (K >= 1 && cfg.edge(K) >= q) --K;
  while (cfg.edge(K + 1) < q) ++K;
  return K;
}

}  // namespace

cplx good_term(const HmcSample& sample, const SplitConfig& cfg, std::size_t q) {
  require_gaussians(sample, cfg);
  const std::size_t K = block_of(cfg, q);
  if (K == 0 || K >= cfg.L) return {};
  const std::size_t u = cfg.edge(K);
  const std::size_t s = cfg.n + cfg.r - q;
  const auto g = GeneratorVec::from_gaussians(sample.gaussians);
  const CoeffVec table = restricted_exp(g, sample.theta(), u, s);
  return std::sqrt(sample.theta()) * sample.gaussians[q] / std::sqrt(static_cast<double>(q)) * table[s];
}

cplx good_part(const HmcSample& sample, const SplitConfig& cfg) {
  require_gaussians(sample, cfg);
  const double st = std::sqrt(sample.theta());
  const auto g = GeneratorVec::from_gaussians(sample.gaussians);
  cplx total{};
  for (std::size_t K = 1; K + 1 <= cfg.L; ++K) {
    const std::size_t u = cfg.edge(K);
    const std::size_t q_lo = u + 1;
    const std::size_t q_hi = cfg.edge(K + 1);
    if (q_lo > q_hi) continue;
    // One restricted table per block, to the largest degree the block uses.
    const std::size_t s_top = cfg.n + cfg.r - q_lo;
    const CoeffVec table = restricted_exp(g, sample.theta(), u, s_top);
    cplx block{};
    for (std::size_t q = q_lo; q <= q_hi; ++q) {
      block += sample.gaussians[q] / std::sqrt(static_cast<double>(q)) * table[cfg.n + cfg.r - q];
    }
    total += st * block;
  }
  return total;
}

cplx bad_part(const HmcSample& sample, const SplitConfig& cfg) {
  return sample.c(cfg.n + cfg.r) - good_part(sample, cfg);
}

SplitResult split(const HmcSample& sample, const SplitConfig& cfg) {
  const cplx good = good_part(sample, cfg);
  return {good, sample.c(cfg.n + cfg.r) - good};
}

SplitResult split_enumerated(const HmcSample& sample, const SplitConfig& cfg) {
  require_gaussians(sample, cfg);
  const std::size_t total = cfg.n + cfg.r;
  if (total > kBruteForceMaxDegree) throw SizeError("split_enumerated: n + r above 14");
  const double st = std::sqrt(sample.theta());
  std::vector<double> factorial(total + 1, 1.0);
  for (std::size_t i = 1; i <= total; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);

  SplitResult out{};
  // k descends, so the first active k is the largest; `top` and `top_mult`
  // record it, `second` the next active frequency.
  auto visit = [&](auto&& self, std::size_t k, std::size_t remaining, cplx term, std::size_t top,
                   std::size_t top_mult, std::size_t second) -> void {
    if (remaining == 0) {
      const std::size_t K = top_mult == 1 ? block_of(cfg, top) : 0;
      const bool good = K >= 1 && K < cfg.L && second <= cfg.edge(K);
      (good ? out.good : out.bad) += term;
      return;
    }
    if (k == 0) return;
    const cplx base = st * sample.gaussians[k] / std::sqrt(static_cast<double>(k));
    cplx power = 1.0;
    for (std::size_t m = 0; m * k <= remaining; ++m) {
      std::size_t t = top, tm = top_mult, sec = second;
      if (m > 0) {
        if (top == 0) {
          t = k;
          tm = m;
        } else if (second == 0) {
          sec = k;
        }
      }
      self(self, k - 1, remaining - m * k, term * power / factorial[m], t, tm, sec);
      power *= base;
    }
  };
  visit(visit, total, total, cplx{1.0}, 0, 0, 0);
  return out;
}

cplx Poly::operator()(cplx z) const noexcept {
  cplx acc{};
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * z + *it;
  return acc;
}

cplx x_n_p(const HmcSample& sample, const Poly& p, std::size_t n) {
  if (n + p.degree() > sample.max_index()) throw SizeError("x_n_p: sample too short for n + deg p");
  cplx sum{};
  for (std::size_t r = 0; r < p.a.size(); ++r) sum += p.a[r] * sample.c(n + r);
  return sum;
}

double scaled_modulus_sq_value(cplx c_n, std::size_t n) {
  if (n < 2) throw DomainError("scaled_modulus_sq: n must be at least 2");
  return std::sqrt(std::numbers::pi) * std::norm(c_n) * std::sqrt(std::log(static_cast<double>(n)));
}

double scaled_modulus_sq(const HmcSample& sample, std::size_t n) {
  if (n > sample.max_index()) throw SizeError("scaled_modulus_sq: index beyond sample");
  return scaled_modulus_sq_value(sample.c(n), n);
}

}  // namespace hmclab
