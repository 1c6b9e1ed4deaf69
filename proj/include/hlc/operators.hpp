#pragma once

#include <span>
#include <vector>

#include "hlc/grid.hpp"
#include "hlc/lanczos.hpp"
#include "hlc/potentials.hpp"

namespace hlc {

/// H = -1/2 Laplacian + V with the kinetic part exact on the Fourier lattice.
class HamiltonianOp {
 public:
  HamiltonianOp(const Grid& grid, std::vector<double> potential);
  HamiltonianOp(const Grid& grid, const ExternalPotentialSpec& spec);
  /// Free Hamiltonian (V = 0).
  explicit HamiltonianOp(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::span<const double> potential() const { return potential_; }
  /// 1/2 |k|^2 in FFT ordering.
  std::span<const double> kinetic() const { return kinetic_; }
  bool has_potential() const { return has_potential_; }

  /// Rigorous enclosure of the discrete spectrum: [min V, max kinetic + max V].
  double lower_bound() const;
  double upper_bound() const;

  /// out = H in. Buffers have grid().size() entries and may not alias.
  void apply(std::span<const cplx> in, std::span<cplx> out) const;

 private:
  Grid grid_;
  std::vector<double> potential_;
  std::vector<double> kinetic_;
  bool has_potential_ = false;
};

WaveFunction apply_hamiltonian(const HamiltonianOp& h, const WaveFunction& psi);

/// dV sum [ 1/2 |grad psi|^2 + V |psi|^2 + 1/2 (v * |psi|^2) |psi|^2 ].
double hartree_energy(const HamiltonianOp& h, const PairInteraction& v, const WaveFunction& psi);
double hartree_energy(const HamiltonianOp& h, const PairPotentialSpec& v, const WaveFunction& psi);

struct SpectralRange {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct SpectralRangeOptions {
  LanczosOptions lanczos{};
};

/// Extreme eigenvalues of the discretized H with certified residual <= tol.
SpectralRange spectral_range(const HamiltonianOp& h, double tol, SpectralRangeOptions opts = {});

struct BoundStateReport {
  bool has_negative_eigenvalue = false;
  double lambda_min = 0.0;
  double threshold = 0.0;
  double residual = 0.0;
};

/// lambda_min < -tol means a bound state. Pass tol <= 0 for the default
/// 1e-8 * (upper spectral bound).
BoundStateReport bound_state_check(const HamiltonianOp& h, double tol = 0.0,
                                   SpectralRangeOptions opts = {});

}  // namespace hlc
