#pragma once

#include <string>
#include <vector>

#include "hlc/grid.hpp"

namespace hlc {

enum class ExternalFamily { zero, inverse_power, gaussian_well, shielded_well };
enum class PairFamily { zero, gaussian, inverse_power_regularized };

/// External one-body potential V.
///
///   inverse_power:  V0 <x>^{-sigma}
///   gaussian_well:  V0 exp(-|x|^2 / (2 w^2))
///   shielded_well:  gaussian_well plus shield_amplitude exp(-|x|^2 / (2 shield_width^2))
///
/// `alpha`, `delta` and `positive_constant` parametrize the sign condition
/// V_+ <= C <x>^{-alpha}, V_- <= delta <x>^{-alpha}.
struct ExternalPotentialSpec {
  ExternalFamily family = ExternalFamily::zero;
  double amplitude = 0.0;
  double decay_rate = 0.0;
  double width = 1.0;
  double shield_amplitude = 0.0;
  double shield_width = 1.0;
  double alpha = 3.0;
  double delta = 0.1;
  double positive_constant = 1.0;

  /// Value at radius r.
  double radial(double r) const;
};

/// Pair potential v. `lq_index` is q and `smoothness_index` is gamma of the
/// integrability condition on v.
struct PairPotentialSpec {
  PairFamily family = PairFamily::zero;
  double amplitude = 0.0;
  double width = 1.0;
  double decay = 0.0;
  double lq_index = 1.0;
  double smoothness_index = 1.0;

  double radial(double r) const;
};

ExternalFamily parse_external_family(const std::string& name);
PairFamily parse_pair_family(const std::string& name);
std::string to_string(ExternalFamily f);
std::string to_string(PairFamily f);

/// Real field W(x) at time t.
struct EffectivePotentialField {
  Grid grid;
  std::vector<double> values;
  double time = 0.0;
};

std::vector<double> evaluate_external(const ExternalPotentialSpec& spec, const Grid& grid);

/// Periodic convolution kernel for v on a fixed grid; the Fourier transform is
/// computed once and reused for every density.
class PairInteraction {
 public:
  PairInteraction(const PairPotentialSpec& spec, const Grid& grid);

  const Grid& grid() const { return grid_; }
  const PairPotentialSpec& spec() const { return spec_; }
  bool is_zero() const { return zero_; }
  /// v(L/2) / v(0) > 1e-10: periodic images of v overlap noticeably.
  bool wraps() const { return wraps_; }
  /// dV sum |v|, the discrete L1 norm.
  double l1_norm() const { return l1_; }

  /// v * |psi|^2 (periodic, computed spectrally).
  EffectivePotentialField effective_potential(const WaveFunction& psi, double time = 0.0) const;
  /// Same, writing into an existing buffer.
  void effective_potential(std::span<const cplx> psi, std::span<double> out) const;

 private:
  PairPotentialSpec spec_;
  Grid grid_;
  std::vector<cplx> kernel_hat_;
  double l1_ = 0.0;
  bool zero_ = false;
  bool wraps_ = false;
};

EffectivePotentialField effective_potential(const PairPotentialSpec& v, const WaveFunction& psi);

enum class Check { pass, fail, unchecked };
std::string to_string(Check c);

struct ConditionReport {
  Check v_integrability = Check::unchecked;
  double v_smoothness_margin = 0.0;
  Check v_smoothness = Check::unchecked;
  Check q_range = Check::unchecked;
  Check V_decay = Check::unchecked;
  Check V_negative_part_small = Check::unchecked;
  Check V_positive_part_decay = Check::unchecked;
  std::vector<std::string> notes;

  bool all_pass() const;
};

/// Parameter arithmetic only: no grid is involved.
ConditionReport check_conditions(const ExternalPotentialSpec& V, const PairPotentialSpec& v, int dim);

struct WtNorms {
  double linf = 0.0;
  /// max over axes of the sup norm of the spectral gradient component
  double grad_linf = 0.0;
  /// linf + sum over axes of |d_i W|_inf
  double w1inf = 0.0;
  /// max over 1 <= |alpha| <= 2 of |d^alpha W|_inf
  double max_second = 0.0;
};

WtNorms wt_norms(const EffectivePotentialField& w);

}  // namespace hlc
