#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "hlc/grid.hpp"
#include "hlc/lanczos.hpp"
#include "hlc/operators.hpp"
#include "hlc/smooth.hpp"

namespace hlc {

struct WindowSamples {
  std::vector<double> x;
  /// derivative[k][i] = g^{(k)}(x[i]) for k = 0..3.
  std::array<std::vector<double>, 4> derivative;
};

/// Real energy window g in C_0^inf((E1, E2)) with g = 1 on the plateau
/// [E1 + shoulder, E2 - shoulder]:
///   g(x) = h((x - E1) / shoulder) h((E2 - x) / shoulder)
/// where h is the smooth step of smooth.hpp.
class SpectralWindow {
 public:
  SpectralWindow(double e1, double e2, double shoulder);
  /// Window whose plateau is [lo, hi] and support (lo - shoulder, hi + shoulder).
  static SpectralWindow from_plateau(double lo, double hi, double shoulder);

  double lower() const { return e1_; }
  double upper() const { return e2_; }
  double shoulder() const { return shoulder_; }
  double plateau_lower() const { return e1_ + shoulder_; }
  double plateau_upper() const { return e2_ - shoulder_; }
  double plateau_fraction() const { return 1.0 - 2.0 * shoulder_ / (e2_ - e1_); }

  double operator()(double x) const;

  template <std::size_t N>
  Jet<N> jet(double x) const {
    if (x <= e1_ || x >= e2_) return Jet<N>{};
    const Jet<N> t = Jet<N>::variable(x);
    const double inv = 1.0 / shoulder_;
    const Jet<N> left = smooth_step(inv * (t - Jet<N>::constant(e1_)));
    const Jet<N> right = smooth_step(inv * (Jet<N>::constant(e2_) - t));
    return left * right;
  }

  /// g, g', ..., g^{(order)} at x; order <= 8.
  std::vector<double> derivatives(double x, int order) const;
  /// `count` equispaced samples over [E1, E2] with derivatives up to order 3.
  WindowSamples tabulate(std::size_t count) const;

 private:
  double e1_;
  double e2_;
  double shoulder_;
};

/// Window on (E1, E2) whose plateau covers `plateau_fraction` of the interval.
SpectralWindow make_window(double e1, double e2, double plateau_fraction);

using RealFunction = std::function<double(double)>;

/// Chebyshev series of f on [lo, hi]: f(x) ~ c_0/2 + sum_k c_k T_k((x - c) / r).
class ChebyshevExpansion {
 public:
  ChebyshevExpansion(const RealFunction& f, double lo, double hi, int degree);
  /// Smallest degree whose coefficient tail is <= tol.
  static ChebyshevExpansion to_tolerance(const RealFunction& f, double lo, double hi, double tol,
                                         int max_degree = 1 << 20);

  int degree() const { return static_cast<int>(coef_.size()) - 1; }
  /// sum_{k > degree} |c_k|: bounds sup |g - p| on [lo, hi].
  double tail_bound() const { return tail_; }
  std::span<const double> coefficients() const { return coef_; }

  double evaluate(double x) const;
  /// out = p(H) in by the Clenshaw recurrence. H's spectrum must lie in [lo, hi].
  void apply(const HamiltonianOp& h, std::span<const cplx> in, std::span<cplx> out) const;

 private:
  ChebyshevExpansion(std::vector<double> all, double lo, double hi, int degree);

  std::vector<double> coef_;
  double center_ = 0.0;
  double radius_ = 1.0;
  double tail_ = 0.0;
};

struct WindowApplication {
  WaveFunction value;
  /// Bound on ||computed - g(H) psi||.
  double error_bound = 0.0;
  int degree = 0;
};

/// g(H) psi by a degree-`degree` Chebyshev expansion over the enclosure
/// [H.lower_bound(), H.upper_bound()]. Throws ToleranceNotMet when the
/// coefficient tail exceeds `tolerance`.
WindowApplication apply_window_cheb(const HamiltonianOp& h, const SpectralWindow& g,
                                    const WaveFunction& psi, int degree,
                                    double tolerance = std::numeric_limits<double>::infinity());
/// Same with the degree chosen so the coefficient tail is <= tolerance.
WindowApplication apply_window_cheb_auto(const HamiltonianOp& h, const SpectralWindow& g,
                                         const WaveFunction& psi, double tolerance = 1e-10);

/// Quadrature for the resolvent representation
///   g(H) = -(1/pi) int dbar(g~)(z) (z - H)^{-1} dx dy.
struct HsQuadrature {
  /// Order n of the almost-analytic extension, in {2, 3, 4}.
  int order = 3;
  /// Trapezoid step in Re z; 0 picks min(0.005, shoulder / 100).
  double x_step = 0.0;
  /// Cutoff height eps in |Im z|; 0 picks the window shoulder.
  double y_max = 0.0;
  /// Gauss-Kronrod panels on (0, eps); must be even so eps/2 is a panel edge.
  int y_panels = 4;
  /// Relative residual for each resolvent solve.
  double solver_tol = 1e-10;
  int max_iterations = 4000;
  int restart = 60;
};

struct HsApplication {
  WaveFunction value;
  /// |Kronrod-15 / full-x result - Gauss-7 / half-x result|.
  double quadrature_error = 0.0;
  /// Propagated resolvent residuals.
  double solver_error = 0.0;
  int solves = 0;
  int max_solver_iterations = 0;
};

HsApplication apply_window_hs(const HamiltonianOp& h, const SpectralWindow& g,
                              const WaveFunction& psi, const HsQuadrature& quad = {});

/// dbar of the order-n almost-analytic extension of g at x + iy, with
/// cutoff tau(|y| / eps).
cplx almost_analytic_dbar(const SpectralWindow& g, int order, double eps, double x, double y);

struct ResolventSolve {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solves (z - H) x = b by restarted GMRES, right-preconditioned with the
/// free resolvent (z - K - mean V)^{-1}. Throws ConvergenceFailure.
ResolventSolve solve_resolvent(const HamiltonianOp& h, cplx z, std::span<const cplx> b,
                               std::span<cplx> x, double tol, int max_iterations = 4000,
                               int restart = 60);

struct SpeedBoundResult {
  double k_I = 0.0;
  SpectralWindow window{0.0, 1.0, 0.25};
  int iterations = 0;
  /// Certified bound on |k_I - || |grad| g(H) |||.
  double residual = 0.0;
};

struct SpeedBoundOptions {
  LanczosOptions lanczos{};
};

/// k_I = || |grad| g(H) || from the top eigenvalue of g(H)(-Laplacian)g(H).
SpeedBoundResult speed_bound(const HamiltonianOp& h, const SpectralWindow& g, double tol,
                             SpeedBoundOptions opts = {});

/// Sharp-indicator value: intercept of a least-squares line through
/// (shoulder, k_I) pairs.
double extrapolate_sharp_speed(std::span<const double> shoulders, std::span<const double> k_values);

struct CommutatorOptions {
  int probes = 16;
  /// Randomized restarts of the Krylov power iteration.
  int restarts = 8;
  int krylov_dim = 20;
  double cheb_tol = 1e-8;
  std::uint64_t seed = 0xc0ffee;
};

struct CommutatorEstimate {
  /// max(random_lower_bound, power_estimate).
  double norm = 0.0;
  /// max_j ||[g(H), W] u_j|| over unit random probes.
  double random_lower_bound = 0.0;
  double power_estimate = 0.0;
  /// max_{1<=|alpha|<=2} ||d^alpha W||_inf.
  double derivative_bound = 0.0;
};

/// || [g(H), W] || for a real multiplication field W on H's grid.
CommutatorEstimate commutator_norm(const HamiltonianOp& h, const SpectralWindow& g,
                                   std::span<const double> w, const CommutatorOptions& opts = {});

}  // namespace hlc
