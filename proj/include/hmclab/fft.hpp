#pragma once

#include <complex>
#include <span>

namespace hmclab::fft {

enum class Direction { kForward, kBackward };

/// In-place unnormalized DFT. Forward uses e^{-2 pi i jk/n}, backward
/// e^{+2 pi i jk/n}. Plans are cached per (size, direction) and shared
/// across threads; execution is thread-safe and bitwise deterministic.
void transform(std::span<std::complex<double>> data, Direction dir);

}  // namespace hmclab::fft
