#pragma once

#include <vector>

#include "hlc/operators.hpp"
#include "hlc/potentials.hpp"

namespace hlc {

/// Strang splitting: half potential phase, exact kinetic phase, half potential phase.
struct StepperConfig {
  double dt = 1e-3;
  /// Wave-function snapshots every `record_stride` steps.
  int record_stride = 1;
  /// Effective-potential snapshots every `potential_stride` steps; 0 means record_stride.
  int potential_stride = 0;
  /// Relative L2 drift that aborts a nonlinear run.
  double drift_tolerance = 1e-6;
  /// Optional sanity override of dt * lambda_max <= pi. Only tests disable it.
  bool enforce_phase_bound = true;
};

/// Time-indexed W fields with linear interpolation in time.
class PotentialSeries {
 public:
  PotentialSeries() = default;
  explicit PotentialSeries(std::vector<EffectivePotentialField> fields);

  bool empty() const { return fields_.empty(); }
  std::size_t size() const { return fields_.size(); }
  const std::vector<EffectivePotentialField>& fields() const { return fields_; }
  double first_time() const;
  double last_time() const;
  bool covers(double t0, double t1) const;

  void push_back(EffectivePotentialField field);
  /// W(t) by linear interpolation between neighbouring snapshots.
  void interpolate(double t, std::span<double> out) const;
  /// All snapshots identically zero.
  bool identically_zero() const;

 private:
  std::vector<EffectivePotentialField> fields_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<WaveFunction> snapshots;
  /// W_t for Hartree and NLS runs; empty for linear runs.
  PotentialSeries effective_potentials;
};

/// e^{-itH} psi0 on [0, T].
Trajectory evolve_linear(const HamiltonianOp& h, const WaveFunction& psi0, double T,
                         const StepperConfig& cfg);

/// i d/dt psi = (H + v * |psi|^2) psi on [0, T].
Trajectory evolve_hartree(const HamiltonianOp& h, const PairInteraction& v, const WaveFunction& psi0,
                          double T, const StepperConfig& cfg);
Trajectory evolve_hartree(const HamiltonianOp& h, const PairPotentialSpec& v,
                          const WaveFunction& psi0, double T, const StepperConfig& cfg);

/// i d/dt psi = (H + kappa |psi|^{2 sigma}) psi on [0, T].
Trajectory evolve_nls(const HamiltonianOp& h, double sigma, const WaveFunction& psi0, double T,
                      const StepperConfig& cfg, double coupling = 1.0);

/// U(t_to, t_from) generated by H + W_t with W interpolated from `w_series`.
/// t_to < t_from integrates backward; the backward step is the exact inverse
/// of the forward step.
WaveFunction evolve_td_linear(const HamiltonianOp& h, const PotentialSeries& w_series,
                              const WaveFunction& phi, double t_from, double t_to,
                              const StepperConfig& cfg);

/// Number of steps used for an interval of length `span` with step `dt`.
int step_count(double span, double dt);

}  // namespace hlc
