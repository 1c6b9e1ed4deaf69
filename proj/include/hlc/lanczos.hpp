#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hlc {

/// y = A x for a Hermitian A. Inputs and outputs have equal length.
using HermitianApply = std::function<void(std::span<const std::complex<double>>,
                                          std::span<std::complex<double>>)>;

enum class Extreme { smallest, largest, largest_magnitude };

struct LanczosOptions {
  int krylov_dim = 60;
  int max_restarts = 40;
  /// Absolute residual |A x - theta x| required to stop.
  double tolerance = 1e-8;
  std::uint64_t seed = 0x5eed;
};

struct EigenEstimate {
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<std::complex<double>> vector;
};

/// Explicitly restarted Lanczos with full reorthogonalization: a
/// Krylov-accelerated power iteration that restarts from the current Ritz
/// vector. Throws ConvergenceFailure carrying the best estimate.
EigenEstimate lanczos_extreme(const HermitianApply& op, std::size_t dim, Extreme which,
                              const LanczosOptions& opts);

/// Same, starting from a caller-supplied vector.
EigenEstimate lanczos_extreme(const HermitianApply& op, std::vector<std::complex<double>> start,
                              Extreme which, const LanczosOptions& opts);

/// Standard complex Gaussian random vector normalized to unit Euclidean norm.
std::vector<std::complex<double>> random_unit_vector(std::size_t dim, std::uint64_t seed);

}  // namespace hlc
