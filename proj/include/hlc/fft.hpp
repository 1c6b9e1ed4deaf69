#pragma once

#include <span>

#include "hlc/grid.hpp"

namespace hlc::fft {

// Plans are cached per (dim, n) and shared between threads; executing them
// on caller-owned buffers is safe concurrently.

/// Unnormalized forward transform, in place.
void forward(const Grid& grid, std::span<cplx> data);
/// Inverse transform including the 1/N factor, in place.
void inverse(const Grid& grid, std::span<cplx> data);

/// Applies a real Fourier multiplier: data <- IFFT(m * FFT(data)).
void apply_multiplier(const Grid& grid, std::span<cplx> data, std::span<const double> multiplier);
/// Same with a complex multiplier.
void apply_multiplier(const Grid& grid, std::span<cplx> data, std::span<const cplx> multiplier);

/// DCT-II of length M: out[k] = 2 sum_j in[j] cos(pi k (j + 1/2) / M).
void dct2(std::span<const double> in, std::span<double> out);

}  // namespace hlc::fft
