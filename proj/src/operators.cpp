#include "hlc/operators.hpp"

#include <algorithm>
#include <cmath>

#include "hlc/errors.hpp"
#include "hlc/fft.hpp"
#include "hlc/kernels.hpp"

namespace hlc {

HamiltonianOp::HamiltonianOp(const Grid& grid, std::vector<double> potential)
    : grid_(grid), potential_(std::move(potential)), kinetic_(grid.wavenumber_squared()) {
  if (potential_.size() != grid.size())
    throw DimensionMismatch("potential size does not match grid");
  for (double& k : kinetic_) k *= 0.5;
  for (double v : potential_) {
    if (!std::isfinite(v)) throw InvalidParameter("potential contains a non-finite value");
    if (v != 0.0) has_potential_ = true;
  }
}

HamiltonianOp::HamiltonianOp(const Grid& grid, const ExternalPotentialSpec& spec)
    : HamiltonianOp(grid, evaluate_external(spec, grid)) {}

HamiltonianOp::HamiltonianOp(const Grid& grid)
    : HamiltonianOp(grid, std::vector<double>(grid.size(), 0.0)) {}

double HamiltonianOp::lower_bound() const {
  return *std::min_element(potential_.begin(), potential_.end());
}

double HamiltonianOp::upper_bound() const {
  return *std::max_element(kinetic_.begin(), kinetic_.end()) +
         *std::max_element(potential_.begin(), potential_.end());
}

void HamiltonianOp::apply(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.size() != grid_.size() || out.size() != grid_.size())
    throw DimensionMismatch("apply_hamiltonian: buffer size does not match grid");
  std::copy(in.begin(), in.end(), out.begin());
  fft::apply_multiplier(grid_, out, std::span<const double>(kinetic_));
  if (has_potential_) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += potential_[i] * in[i];
  }
}

WaveFunction apply_hamiltonian(const HamiltonianOp& h, const WaveFunction& psi) {
  require_same_grid(h.grid(), psi.grid(), "apply_hamiltonian");
  WaveFunction out(psi.grid());
  h.apply(psi.values(), out.values());
  return out;
}

double hartree_energy(const HamiltonianOp& h, const PairInteraction& v, const WaveFunction& psi) {
  require_same_grid(h.grid(), psi.grid(), "hartree_energy");
  require_same_grid(v.grid(), psi.grid(), "hartree_energy");
  const Grid& g = psi.grid();
  std::vector<cplx> hat(psi.values().begin(), psi.values().end());
  fft::forward(g, hat);
  // Parseval: dV sum 1/2|grad psi|^2 = dV / N sum 1/2 |k|^2 |psi_hat|^2.
  const double kinetic =
      kernels::weighted_norm_squared(hat, h.kinetic()) / static_cast<double>(g.size());
  const double external = kernels::weighted_norm_squared(psi.values(), h.potential());
  double interaction = 0.0;
  if (!v.is_zero()) {
    std::vector<double> w(g.size());
    v.effective_potential(psi.values(), w);
    interaction = 0.5 * kernels::weighted_norm_squared(psi.values(), w);
  }
  return g.cell_volume() * (kinetic + external + interaction);
}

double hartree_energy(const HamiltonianOp& h, const PairPotentialSpec& v, const WaveFunction& psi) {
  return hartree_energy(h, PairInteraction(v, psi.grid()), psi);
}

SpectralRange spectral_range(const HamiltonianOp& h, double tol, SpectralRangeOptions opts) {
  if (!(tol > 0.0)) throw InvalidParameter("spectral_range: tol must be > 0");
  opts.lanczos.tolerance = tol;
  const HermitianApply op = [&h](std::span<const cplx> x, std::span<cplx> y) { h.apply(x, y); };
  const EigenEstimate lo = lanczos_extreme(op, h.grid().size(), Extreme::smallest, opts.lanczos);
  LanczosOptions hi_opts = opts.lanczos;
  hi_opts.seed = opts.lanczos.seed + 1;
  const EigenEstimate hi = lanczos_extreme(op, h.grid().size(), Extreme::largest, hi_opts);
  return SpectralRange{lo.value, hi.value, lo.iterations + hi.iterations,
                       std::max(lo.residual, hi.residual)};
}

BoundStateReport bound_state_check(const HamiltonianOp& h, double tol, SpectralRangeOptions opts) {
  const double threshold = tol > 0.0 ? tol : 1e-8 * h.upper_bound();
  if (!(threshold > 0.0)) throw InvalidParameter("bound_state_check: tolerance must be > 0");
  const HermitianApply op = [&h](std::span<const cplx> x, std::span<cplx> y) { h.apply(x, y); };
  opts.lanczos.tolerance = std::max(opts.lanczos.tolerance, threshold);
  const EigenEstimate lo = lanczos_extreme(op, h.grid().size(), Extreme::smallest, opts.lanczos);
  return BoundStateReport{lo.value < -threshold, lo.value, threshold, lo.residual};
}

}  // namespace hlc
