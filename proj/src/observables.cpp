#include "hlc/observables.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "hlc/errors.hpp"
#include "hlc/potentials.hpp"
#include "hlc/smooth.hpp"

namespace hlc {

namespace {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_label(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

TailMass tail_mass(const WaveFunction& psi, double t, const ConeSpec& cone) {
  if (!(cone.c > 0.0) || !(cone.a > 0.0)) throw InvalidParameter("cone needs c > 0 and a > 0");
  const Grid& grid = psi.grid();
  const double radius = cone.c * std::abs(t) + cone.a;
  TailMass out;
  out.box_limited = radius >= 0.5 * grid.box_length();
  if (out.box_limited) return out;
  const double r2 = radius * radius;
  const auto rr = grid.radius_squared();
  double sum = 0.0;
  for (std::size_t i = 0; i < rr.size(); ++i) {
    if (rr[i] >= r2) sum += std::norm(psi[i]);
  }
  out.value = std::sqrt(grid.cell_volume() * sum);
  return out;
}

PowerLawFit decay_fit(std::span<const double> times, std::span<const double> values, double t_lo,
                      double t_hi) {
  if (times.size() != values.size()) throw DimensionMismatch("decay_fit: series lengths differ");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw InvalidParameter("decay_fit: values must be positive and finite, got " +
                             std::to_string(values[i]) + " at t = " + std::to_string(times[i]));
    x.push_back(std::log(japanese(times[i] * times[i])));
    y.push_back(std::log(values[i]));
  }
  if (x.size() < 8)
    throw InvalidParameter("decay_fit: need >= 8 samples in the window, got " + std::to_string(x.size()));
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidParameter("decay_fit: window holds a single time");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.amplitude = std::exp(my - fit.exponent * mx);
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + fit.exponent * (x[i] - mx));
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.samples = static_cast<int>(x.size());
  return fit;
}

double power_law_tail(const PowerLawFit& fit, double T) {
  if (!(fit.exponent < -1.0)) return std::numeric_limits<double>::infinity();
  if (fit.amplitude == 0.0) return 0.0;
  boost::math::quadrature::exp_sinh<double> integrator;
  const double p = fit.exponent;
  const double a = fit.amplitude;
  return integrator.integrate([a, p](double r) { return a * std::pow(1.0 + r * r, 0.5 * p); }, T,
                              std::numeric_limits<double>::infinity());
}

TailIntegral tail_integral(std::span<const double> times, std::span<const double> rate) {
  if (times.size() != rate.size()) throw DimensionMismatch("tail_integral: series lengths differ");
  TailIntegral out;
  const std::size_t n = times.size();
  out.values.assign(n, 0.0);
  if (n == 0) return out;
  for (std::size_t i = n - 1; i-- > 0;)
    out.values[i] = out.values[i + 1] + 0.5 * (rate[i] + rate[i + 1]) * (times[i + 1] - times[i]);

  const bool all_zero = std::all_of(rate.begin(), rate.end(), [](double r) { return r == 0.0; });
  if (all_zero) return out;
  const double T = times.back();
  try {
    out.fit = decay_fit(times, rate, 0.5 * T, T);
    out.tail = power_law_tail(out.fit, T);
  } catch (const InvalidParameter&) {
    out.tail = std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(out.tail)) {
    out.truncated = true;
    out.fit.flags.push_back("tail_not_integrable");
    return out;
  }
  for (double& v : out.values) v += out.tail;
  return out;
}

std::string tail_column(const ConeSpec& cone) {
  return "tail_" + format_label(cone.c) + "_" + format_label(cone.a);
}

std::string lp_column(double p) {
  return std::isinf(p) ? std::string("lp_inf") : "lp_" + format_label(p);
}

namespace {

struct WNormSeries {
  std::vector<double> times;
  std::vector<double> linf;
  std::vector<double> w1inf;
  std::vector<double> second;
};

WNormSeries w_norm_series(const PotentialSeries& series) {
  WNormSeries out;
  for (const auto& field : series.fields()) {
    const WtNorms n = wt_norms(field);
    out.times.push_back(field.time);
    out.linf.push_back(n.linf);
    out.w1inf.push_back(n.w1inf);
    out.second.push_back(n.max_second);
  }
  return out;
}

double interpolate_at(const std::vector<double>& ts, const std::vector<double>& vs, double t) {
  if (ts.empty()) return 0.0;
  if (t <= ts.front()) return vs.front();
  if (t >= ts.back()) return vs.back();
  const auto it = std::lower_bound(ts.begin(), ts.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - ts.begin());
  if (*it == t) return vs[j];
  const double theta = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
  return (1.0 - theta) * vs[j - 1] + theta * vs[j];
}

}  // namespace

ObservableSeries measure(const Trajectory& traj, const ObservableSpec& spec) {
  ObservableSeries s;
  s.spec = spec;
  s.times = traj.times;
  const std::size_t n = traj.times.size();
  s.lp.assign(spec.p_list.size(), std::vector<double>(n));
  s.tail.assign(spec.cones.size(), std::vector<double>(n));
  s.box_limited.assign(spec.cones.size(), std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const WaveFunction& psi = traj.snapshots[i];
    s.l2.push_back(l2_norm(psi));
    s.hs.push_back(sobolev_norm(psi, spec.s));
    s.l2g.push_back(weighted_norm(psi, spec.gamma));
    for (std::size_t j = 0; j < spec.p_list.size(); ++j) s.lp[j][i] = lp_norm(psi, spec.p_list[j]);
    for (std::size_t j = 0; j < spec.cones.size(); ++j) {
      const TailMass m = tail_mass(psi, traj.times[i], spec.cones[j]);
      s.tail[j][i] = m.value;
      s.box_limited[j][i] = m.box_limited;
    }
  }

  s.W_linf.assign(n, 0.0);
  s.W_w1inf.assign(n, 0.0);
  s.W_second.assign(n, 0.0);
  s.w_t.assign(n, 0.0);
  s.wprime_t.assign(n, 0.0);
  if (traj.effective_potentials.empty()) return s;

  const WNormSeries w = w_norm_series(traj.effective_potentials);
  for (std::size_t i = 0; i < n; ++i) {
    s.W_linf[i] = interpolate_at(w.times, w.linf, s.times[i]);
    s.W_w1inf[i] = interpolate_at(w.times, w.w1inf, s.times[i]);
    s.W_second[i] = interpolate_at(w.times, w.second, s.times[i]);
  }
  const TailIntegral wt = tail_integral(w.times, w.w1inf);
  const TailIntegral wp = tail_integral(w.times, w.second);
  for (std::size_t i = 0; i < n; ++i) {
    s.w_t[i] = interpolate_at(w.times, wt.values, s.times[i]);
    s.wprime_t[i] = interpolate_at(w.times, wp.values, s.times[i]);
  }
  s.wt_truncated = wt.truncated || wp.truncated;
  s.wt_fit = wt.fit;
  return s;
}

void wt_tail_integrals(ObservableSeries& series) {
  const TailIntegral wt = tail_integral(series.times, series.W_w1inf);
  const TailIntegral wp = tail_integral(series.times, series.W_second);
  series.w_t = wt.values;
  series.wprime_t = wp.values;
  series.wt_truncated = wt.truncated || wp.truncated;
  series.wt_fit = wt.fit;
}

void write_series_csv(std::ostream& out, const ObservableSeries& s, const std::string& config_hash) {
  out << "# config_hash: " << config_hash << "\n";
  out << "t,l2,hs,l2g";
  for (double p : s.spec.p_list) out << "," << lp_column(p);
  for (const auto& cone : s.spec.cones) out << "," << tail_column(cone);
  out << ",W_linf,W_w1inf,w_t,wprime_t\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    out << format_number(s.times[i]) << "," << format_number(s.l2[i]) << "," << format_number(s.hs[i])
        << "," << format_number(s.l2g[i]);
    for (const auto& col : s.lp) out << "," << format_number(col[i]);
    for (const auto& col : s.tail) out << "," << format_number(col[i]);
    out << "," << format_number(s.W_linf[i]) << "," << format_number(s.W_w1inf[i]) << ","
        << format_number(s.w_t[i]) << "," << format_number(s.wprime_t[i]) << "\n";
  }
}

// ---------------------------------------------------------------- App. E observable

PropagationProfile::PropagationProfile(double width) : width_(width) {
  if (!(width > 0.0)) throw InvalidParameter("propagation profile width c - v must be > 0");
}

PropagationProfile PropagationProfile::constant_one() {
  PropagationProfile p(1.0);
  p.one_ = true;
  return p;
}

double PropagationProfile::operator()(double u) const {
  if (one_) return 1.0;
  const double h = smooth_step(u / width_);
  return h * h * (3.0 - 2.0 * h);
}

double PropagationProfile::derivative(double u) const {
  if (one_) return 0.0;
  const double t = u / width_;
  const double h = smooth_step(t);
  return 6.0 * h * (1.0 - h) * smooth_step_derivative(t) / width_;
}

double PropagationProfile::sqrt_derivative(double u) const {
  if (one_) return 0.0;
  const double t = u / width_;
  if (t <= 0.0 || t >= 1.0) return 0.0;
  // sqrt(h (1 - h)) = sqrt(E(t) E(1-t)) / (E(t) + E(1-t)), E(t) = exp(-1/t).
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  const double root_hh = std::exp(-0.5 / t - 0.5 / (1.0 - t)) / (a + b);
  return std::sqrt(6.0 / width_) * root_hh * smooth_step_sqrt_derivative(t);
}

PropagationSeries propagation_observable(const Trajectory& traj, const PropagationObservableSpec& spec) {
  if (!(spec.s > 0.0)) throw InvalidParameter("propagation observable scale s must be > 0");
  const PropagationProfile f =
      spec.constant_profile ? PropagationProfile::constant_one() : PropagationProfile(spec.c - spec.v);
  PropagationSeries out;
  out.times = traj.times;
  if (traj.snapshots.empty()) return out;
  const Grid& grid = traj.snapshots.front().grid();
  const auto rr = grid.radius_squared();
  std::vector<double> bracket(rr.size());
  for (std::size_t i = 0; i < rr.size(); ++i) bracket[i] = japanese(rr[i]);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const WaveFunction& psi = traj.snapshots[k];
    const double t = traj.times[k];
    double sum = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < rr.size(); ++i) {
      const double x_ts = (bracket[i] - spec.a - spec.v * t) / spec.s;
      const double m = std::norm(psi[i]);
      sum += f(x_ts) * m;
      mass += m;
    }
    out.phi.push_back(grid.cell_volume() * sum);
    out.norm_squared.push_back(grid.cell_volume() * mass);
  }
  const std::size_t n = out.phi.size();
  out.dphi.assign(n, 0.0);
  if (n >= 2) {
    out.dphi[0] = (out.phi[1] - out.phi[0]) / (out.times[1] - out.times[0]);
    out.dphi[n - 1] = (out.phi[n - 1] - out.phi[n - 2]) / (out.times[n - 1] - out.times[n - 2]);
    for (std::size_t k = 1; k + 1 < n; ++k)
      out.dphi[k] = (out.phi[k + 1] - out.phi[k - 1]) / (out.times[k + 1] - out.times[k - 1]);
  }
  return out;
}

EnvelopeFit fit_envelope(std::span<const double> dphi, std::span<const double> w, double s) {
  if (dphi.size() != w.size()) throw DimensionMismatch("fit_envelope: series lengths differ");
  if (!(s > 0.0)) throw InvalidParameter("fit_envelope: s must be > 0");
  const std::size_t n = dphi.size();
  double w_sum = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w_sum += w[i];
    scale = std::max(scale, std::abs(dphi[i]));
  }
  const double slack = 1e-12 * std::max(scale, 1e-300);
  const auto excess = [&](double c, double cp) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, dphi[i] - (c / s + cp * w[i]));
    return m;
  };
  EnvelopeFit best;
  double best_obj = std::numeric_limits<double>::infinity();
  const auto consider = [&](double c, double cp) {
    if (!(c >= 0.0) || !(cp >= 0.0) || !std::isfinite(c) || !std::isfinite(cp)) return;
    const double obj = static_cast<double>(n) * c / s + cp * w_sum;
    if (obj >= best_obj) return;
    const double e = excess(c, cp);
    if (e > slack) return;
    best_obj = obj;
    best = {c, cp, e};
  };

  // The optimum of this two-variable LP sits on a vertex of the feasible set.
  double d_max = 0.0;
  for (double d : dphi) d_max = std::max(d_max, d);
  consider(s * d_max, 0.0);
  double ratio_max = 0.0;
  bool ratio_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] > 0.0)
      ratio_max = std::max(ratio_max, dphi[i] / w[i]);
    else if (dphi[i] > 0.0)
      ratio_ok = false;
  }
  if (ratio_ok) consider(0.0, ratio_max);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (w[i] == w[j]) continue;
      const double cp = (dphi[i] - dphi[j]) / (w[i] - w[j]);
      consider(s * (dphi[i] - cp * w[i]), cp);
    }
  }
  return best;
}

}  // namespace hlc
