#pragma once

#include <complex>
#include <span>

namespace nch::fft {

enum class Direction { forward, backward };

/// Unnormalized 2-D DFT over a row-major ny x nx array (x fastest):
///   out[q, p] = sum_{m, n} in[n, m] exp(-+2 pi i (p m / nx + q n / ny)),
/// minus sign for forward. Plans are cached per shape; safe to call from
/// several threads at once.
void transform(int nx, int ny, std::span<std::complex<double>> data,
               Direction direction);

}  // namespace nch::fft
