#pragma once

#include <string>
#include <vector>

#include "hlc/funcalc.hpp"
#include "hlc/observables.hpp"
#include "hlc/potentials.hpp"
#include "hlc/propagators.hpp"

namespace hlc {

/// chi(|x| / b) with chi = 1 on [0, 1/2], 0 on [1, inf), smooth and
/// nonincreasing in between.
struct SpatialCutoff {
  double radius = 1.0;

  /// chi(r) for the unit-radius profile.
  static double profile(double r);
  double operator()(double abs_x) const { return profile(abs_x / radius); }
};

WaveFunction localize(const WaveFunction& phi, const SpatialCutoff& cutoff);

/// Finite-tau realization of g_+^psi(H) = lim (U_tau)^{-1} g(H) U_tau.
struct CutoffJob {
  SpectralWindow window{0.0, 1.0, 0.25};
  PairPotentialSpec pair{};
  double tau_max = 40.0;
  double tol_tail = 1e-5;
  /// Shared by the Hartree run and the linear sweeps; W is recorded every step.
  StepperConfig stepper{};
  /// Chebyshev tolerance for g(H).
  double cheb_tol = 1e-12;
  /// Times in (tau_max / 2, tau_max] where ||[g(H), W_r]|| is sampled for the
  /// derivative-route constant.
  int commutator_samples = 2;
  /// Relative accuracy suffices here: the commutator only scales the certificate.
  CommutatorOptions commutator{16, 2, 20, 1e-6, 0xc0ffee};
};

/// Bound on ||(g_+ - g_tau_max)(H) phi|| <= ||phi|| int_T^inf ||[g(H), W_r]|| dr.
struct TailCertificate {
  double bound = 0.0;
  /// "zero" (W = 0), "sup" (2 ||W_r||_inf), "derivative" (C max_{1<=|a|<=2}
  /// ||d^a W_r||_inf) or "none" when no route gives an integrable fit.
  std::string route = "zero";
  PowerLawFit sup_fit;
  PowerLawFit derivative_fit;
  double commutator_constant = 0.0;
  bool converged = true;
};

struct CutoffResult {
  WaveFunction value;
  TailCertificate tail;
  /// Chebyshev truncation error of the g(H) step.
  double cheb_error = 0.0;
};

/// Uses the W series of `hartree` (which must cover [0, tau_max]).
CutoffResult asymptotic_cutoff(const CutoffJob& job, const HamiltonianOp& h,
                               const PotentialSeries& hartree, const WaveFunction& phi);
/// Runs the Hartree flow of psi0 to tau_max first.
CutoffResult asymptotic_cutoff(const CutoffJob& job, const HamiltonianOp& h, const WaveFunction& psi0,
                               const WaveFunction& phi);

/// Hartree W series of psi0 on [0, tau_max], one field per step.
PotentialSeries hartree_potentials(const CutoffJob& job, const HamiltonianOp& h, const WaveFunction& psi0);

struct DataGenSpec {
  explicit DataGenSpec(WaveFunction seed_field) : seed(std::move(seed_field)) {}

  CutoffJob job{};
  /// Localization radius b.
  double b = 8.0;
  WaveFunction seed;
  /// H^s norm of the localized, windowed input.
  double epsilon = 0.05;
  double s = 1.0;
  double gamma = 1.0;
  double fp_tol = 1e-8;
  int max_iters = 10;
};

struct GammaAdmissibility {
  double lower = 0.0;
  double upper = 0.0;
  bool admissible = false;
};

/// gamma in (d/(2q), d/q - 1).
GammaAdmissibility gamma_admissibility(double gamma, int dim, double q);

struct DatumResult {
  explicit DatumResult(const Grid& grid) : psi0(grid), phi_input(grid) {}

  WaveFunction psi0;
  /// g(H) chi(|x|/b) phi_seed scaled to H^s norm epsilon.
  WaveFunction phi_input;
  int iterations = 0;
  /// Combined H^s + L^2_gamma norm of the last increment.
  double residual = 0.0;
  /// Increment norms d_n of successive iterates.
  std::vector<double> increments;
  /// d_{n+1} / d_n.
  std::vector<double> ratios;
  std::vector<TailCertificate> certificates;
  GammaAdmissibility gamma_check;
};

/// phi_input for a spec: g(H) localize(seed) scaled to H^s norm epsilon.
WaveFunction prepare_input(const HamiltonianOp& h, const DataGenSpec& spec);

/// Fixed point psi0 = g_+^{Psi(psi0)}(H) phi_input seeded at the v = 0
/// solution g(H) phi_input. Throws NonConvergence with the ratio history.
DatumResult construct_datum(const HamiltonianOp& h, const DataGenSpec& spec);

struct InjectivityReport {
  explicit InjectivityReport(const Grid& grid) : first(grid), second(grid) {}

  double output_difference = 0.0;
  double input_difference = 0.0;
  /// output_difference / input_difference (0 when both vanish).
  double ratio = 0.0;
  DatumResult first;
  DatumResult second;
};

/// Compares ||psi0(phi1) - psi0(phi2)||_{H^s} with ||g(H)(phi_in1 - phi_in2)||_{H^s}.
InjectivityReport injectivity_probe(const HamiltonianOp& h, const DataGenSpec& spec,
                                    const WaveFunction& phi1, const WaveFunction& phi2);

}  // namespace hlc
