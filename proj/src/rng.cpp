#include "hmclab/rng.hpp"

#include <cmath>
#include <numbers>

#include "hmclab/errors.hpp"

namespace hmclab {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct StreamIdentity {
  std::uint64_t key;
  std::uint64_t tag;
};

StreamIdentity hash_seed(const Seed& seed) noexcept {
  std::uint64_t a = splitmix64(seed.root);
  std::uint64_t b = splitmix64(seed.root ^ 0x6A09E667F3BCC908ULL);
  for (std::uint64_t p : seed.path) {
    a = splitmix64(a ^ splitmix64(p + 0x3C6EF372FE94F82BULL));
    b = splitmix64(b + splitmix64(p ^ 0xA54FF53A5F1D36F1ULL));
  }
  return {a, b};
}

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53U;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57U;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9U;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85U;

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

namespace {

inline double unit_open_closed(std::uint64_t x) noexcept {
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

inline double unit_closed_open(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace

Seed Seed::child(std::uint64_t index) const {
  Seed s = *this;
  s.path.push_back(index);
  return s;
}

Seed Seed::child(std::initializer_list<std::uint64_t> indices) const {
  Seed s = *this;
  s.path.insert(s.path.end(), indices.begin(), indices.end());
  return s;
}

GaussianStream::GaussianStream(Seed seed) : seed_(std::move(seed)) {
  const StreamIdentity id = hash_seed(seed_);
  key_ = {static_cast<std::uint32_t>(id.key), static_cast<std::uint32_t>(id.key >> 32)};
  stream_tag_ = {static_cast<std::uint32_t>(id.tag), static_cast<std::uint32_t>(id.tag >> 32)};
}

GaussianStream GaussianStream::substream(std::uint64_t index) const {
  return GaussianStream(seed_.child(index));
}

GaussianStream::Block GaussianStream::next_block() noexcept {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(position_), static_cast<std::uint32_t>(position_ >> 32),
      stream_tag_[0], stream_tag_[1]};
  ++position_;
  const auto out = philox4x32_10(ctr, key_);
  return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
          (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

double GaussianStream::next_uniform() noexcept { return unit_closed_open(next_block()[0]); }

std::uint64_t GaussianStream::next_index(std::uint64_t bound) noexcept {
  // Lemire's nearly-divisionless method, one position per attempt.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next_block()[0];
    const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

std::complex<double> GaussianStream::next_complex_gaussian() noexcept {
  const Block b = next_block();
  // Box-Muller in polar form: |N|^2 = -log U1 is Exp(1), arg N uniform.
  const double radius = std::sqrt(-std::log(unit_open_closed(b[0])));
  const double angle = 2.0 * std::numbers::pi * unit_closed_open(b[1]);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

void GaussianStream::fill_complex_gaussian(std::complex<double>* out, std::size_t count) noexcept {
  for (std::size_t i = 0; i < count; ++i) out[i] = next_complex_gaussian();
}

double standard_exponential_from_uniform(double u) noexcept { return -std::log1p(-u); }

double GaussianStream::next_standard_exponential() noexcept {
  return standard_exponential_from_uniform(next_uniform());
}

std::uint64_t GaussianStream::next_poisson(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("next_poisson: lambda must be positive and finite");
  }
  if (lambda <= kPoissonInversionMax) {
    const double u = next_uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    std::uint64_t k = 0;
    // The cap only matters when rounding leaves cdf just below u.
    while (u > cdf && k < 1000) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  // Hormann (1993), PTRS.
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const Block blk = next_block();
    const double u = unit_closed_open(blk[0]) - 0.5;
    const double v = unit_closed_open(blk[1]);
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) {
      return static_cast<std::uint64_t>(k);
    }
    if (k < 0.0 || (us < 0.013 && v > us)) {
      continue;
    }
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace hmclab
