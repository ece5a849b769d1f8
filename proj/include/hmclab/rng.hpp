#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace hmclab {

/// Root seed plus a path of stream indices. Two seeds with equal root and
/// path produce identical streams; distinct paths give independent streams.
struct Seed {
  std::uint64_t root = 0;
  std::vector<std::uint64_t> path;

  Seed() = default;
  explicit Seed(std::uint64_t root_, std::vector<std::uint64_t> path_ = {})
      : root(root_), path(std::move(path_)) {}

  /// Seed for the child stream `index` below this one.
  [[nodiscard]] Seed child(std::uint64_t index) const;
  [[nodiscard]] Seed child(std::initializer_list<std::uint64_t> indices) const;

  friend bool operator==(const Seed&, const Seed&) = default;
};

/// Counter-based random stream (Philox4x32-10 keyed by a hash of the seed).
///
/// Draw k depends only on (seed, k), so a stream can be created or
/// repositioned in O(1). Each position yields 128 random bits; every
/// primitive draw below consumes whole positions.
class GaussianStream {
 public:
  using Block = std::array<std::uint64_t, 2>;

  explicit GaussianStream(Seed seed);

  [[nodiscard]] const Seed& seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t position() const noexcept { return position_; }
  void seek(std::uint64_t position) noexcept { position_ = position; }

  [[nodiscard]] GaussianStream substream(std::uint64_t index) const;

  /// Raw 128-bit block at the current position; advances by one.
  Block next_block() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double next_uniform() noexcept;

  /// Uniform integer in [0, bound); bound > 0.
  std::uint64_t next_index(std::uint64_t bound) noexcept;

  /// Standard complex Gaussian: real and imaginary parts independent
  /// N(0, 1/2). Uses exactly one position.
  std::complex<double> next_complex_gaussian() noexcept;

  /// Poisson(lambda); throws DomainError unless lambda > 0. Sequential-search
  /// inversion for lambda <= 30, transformed rejection (PTRS) above.
  std::uint64_t next_poisson(double lambda);

  /// Exp(1) by inversion, -log(1 - U).
  double next_standard_exponential() noexcept;

  /// Fill `out` with consecutive complex Gaussians.
  void fill_complex_gaussian(std::complex<double>* out, std::size_t count) noexcept;

 private:
  Seed seed_;
  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 2> stream_tag_{};
  std::uint64_t position_ = 0;
};

/// Philox4x32-10 block function: ten rounds on a 128-bit counter.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept;

/// Inverse CDF of Exp(1); exposed so the U = 0 endpoint is testable.
double standard_exponential_from_uniform(double u) noexcept;

/// Poisson threshold between inversion and rejection sampling.
inline constexpr double kPoissonInversionMax = 30.0;

}  // namespace hmclab
