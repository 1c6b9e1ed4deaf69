#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hlc/grid.hpp"
#include "hlc/propagators.hpp"

namespace hlc {

/// Exterior region |x| >= c t + a, sharp indicator on cell centres.
struct ConeSpec {
  double c = 1.0;
  double a = 1.0;
  /// Reference localization radius, reported only.
  double b = 0.0;
};

struct TailMass {
  double value = 0.0;
  /// c t + a reaches the box edge L/2: the region is empty or truncated.
  bool box_limited = false;
};

TailMass tail_mass(const WaveFunction& psi, double t, const ConeSpec& cone);

/// value ~ amplitude * <t>^exponent by least squares in log-log.
struct PowerLawFit {
  double exponent = 0.0;
  double amplitude = 0.0;
  double r2 = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int samples = 0;
  std::vector<std::string> flags;
};

/// Fit over samples with t in [t_lo, t_hi]. Needs >= 8 samples, all values > 0.
PowerLawFit decay_fit(std::span<const double> times, std::span<const double> values, double t_lo,
                      double t_hi);

/// int_T^inf amplitude <r>^exponent dr; infinite unless exponent < -1.
double power_law_tail(const PowerLawFit& fit, double T);

struct TailIntegral {
  /// w(t_i) = int_{t_i}^T f dr + extrapolated tail.
  std::vector<double> values;
  PowerLawFit fit;
  double tail = 0.0;
  /// The tail fit failed or is not integrable; values hold the truncated integrals.
  bool truncated = false;
};

/// Trapezoid integrals of a sampled nonnegative rate from each time to the
/// horizon, plus a power-law tail fitted over the last half of the horizon.
TailIntegral tail_integral(std::span<const double> times, std::span<const double> rate);

struct ObservableSpec {
  double s = 1.0;
  double gamma = 1.0;
  std::vector<double> p_list;
  std::vector<ConeSpec> cones;
};

struct ObservableSeries {
  ObservableSpec spec;
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> hs;
  std::vector<double> l2g;
  /// lp[j][i]: p = spec.p_list[j] at times[i].
  std::vector<std::vector<double>> lp;
  /// tail[j][i]: cone spec.cones[j] at times[i].
  std::vector<std::vector<double>> tail;
  std::vector<std::vector<bool>> box_limited;
  /// Effective-potential norms; zero for linear runs.
  std::vector<double> W_linf;
  std::vector<double> W_w1inf;
  std::vector<double> W_second;
  /// int_t^inf ||W_r||_{W^{1,inf}} dr and the second-derivative variant.
  std::vector<double> w_t;
  std::vector<double> wprime_t;
  bool wt_truncated = false;
  PowerLawFit wt_fit;
};

/// Measures every recorded snapshot. W norms come from the trajectory's
/// effective potentials; the w_t integrals use all recorded W fields.
ObservableSeries measure(const Trajectory& traj, const ObservableSpec& spec);

/// Recomputes w_t and w'_t from the W_w1inf / W_second columns.
void wt_tail_integrals(ObservableSeries& series);

/// Column name for a cone, "tail_<c>_<a>".
std::string tail_column(const ConeSpec& cone);
/// Column name for an L^p norm, "lp_<p>" ("lp_inf" for p = infinity).
std::string lp_column(double p);

/// Writes the series CSV. The first line is "# config_hash: <hash>".
void write_series_csv(std::ostream& out, const ObservableSeries& series, const std::string& config_hash);

/// f in the admissible class: 0 on (-inf, 0], 1 on [width, inf), f' >= 0
/// with smooth sqrt(f'). Built as the cubic smoothstep composed with the
/// C-infinity step, f(u) = S(h(u / width)).
class PropagationProfile {
 public:
  explicit PropagationProfile(double width);
  /// Degenerate f = 1, allowed for testing.
  static PropagationProfile constant_one();

  double operator()(double u) const;
  double derivative(double u) const;
  /// sqrt(f'(u)) in closed form.
  double sqrt_derivative(double u) const;
  double width() const { return width_; }

 private:
  double width_;
  bool one_ = false;
};

struct PropagationObservableSpec {
  /// Threshold speed v and cone speed c > v fix the profile width c - v.
  double v = 1.0;
  double c = 2.0;
  double a = 1.0;
  /// Scale s >= final time.
  double s = 1.0;
  bool constant_profile = false;
};

struct PropagationSeries {
  std::vector<double> times;
  /// <psi_t, f(x_ts) psi_t> with x_ts = (<x> - a - v t) / s.
  std::vector<double> phi;
  /// Centred finite differences of phi (one-sided at the ends).
  std::vector<double> dphi;
  std::vector<double> norm_squared;
};

PropagationSeries propagation_observable(const Trajectory& traj, const PropagationObservableSpec& spec);

/// Smallest nonnegative (C, C') with dphi_i <= C / s + C' w_i for all i,
/// minimizing sum_i (C / s + C' w_i).
struct EnvelopeFit {
  double C = 0.0;
  double C_prime = 0.0;
  /// max_i (dphi_i - envelope_i); <= 0 up to roundoff when feasible.
  double max_excess = 0.0;
};

EnvelopeFit fit_envelope(std::span<const double> dphi, std::span<const double> w, double s);

}  // namespace hlc
