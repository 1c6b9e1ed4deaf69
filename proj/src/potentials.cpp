#include "hlc/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hlc/errors.hpp"
#include "hlc/fft.hpp"
#include "hlc/kernels.hpp"

namespace hlc {

double ExternalPotentialSpec::radial(double r) const {
  switch (family) {
    case ExternalFamily::zero:
      return 0.0;
    case ExternalFamily::inverse_power:
      return amplitude * std::pow(1.0 + r * r, -0.5 * decay_rate);
    case ExternalFamily::gaussian_well:
      return amplitude * std::exp(-r * r / (2.0 * width * width));
    case ExternalFamily::shielded_well:
      return amplitude * std::exp(-r * r / (2.0 * width * width)) +
             shield_amplitude * std::exp(-r * r / (2.0 * shield_width * shield_width));
  }
  throw InvalidParameter("unknown external potential family");
}

double PairPotentialSpec::radial(double r) const {
  switch (family) {
    case PairFamily::zero:
      return 0.0;
    case PairFamily::gaussian:
      return amplitude * std::exp(-r * r / (2.0 * width * width));
    case PairFamily::inverse_power_regularized:
      return amplitude * std::pow(1.0 + r * r, -0.5 * decay);
  }
  throw InvalidParameter("unknown pair potential family");
}

ExternalFamily parse_external_family(const std::string& name) {
  if (name == "zero") return ExternalFamily::zero;
  if (name == "inverse_power") return ExternalFamily::inverse_power;
  if (name == "gaussian_well") return ExternalFamily::gaussian_well;
  if (name == "shielded_well") return ExternalFamily::shielded_well;
  throw InvalidParameter("unknown external potential family '" + name + "'");
}

PairFamily parse_pair_family(const std::string& name) {
  if (name == "zero") return PairFamily::zero;
  if (name == "gaussian") return PairFamily::gaussian;
  if (name == "inverse_power_regularized") return PairFamily::inverse_power_regularized;
  throw InvalidParameter("unknown pair potential family '" + name + "'");
}

std::string to_string(ExternalFamily f) {
  switch (f) {
    case ExternalFamily::zero: return "zero";
    case ExternalFamily::inverse_power: return "inverse_power";
    case ExternalFamily::gaussian_well: return "gaussian_well";
    case ExternalFamily::shielded_well: return "shielded_well";
  }
  return "?";
}

std::string to_string(PairFamily f) {
  switch (f) {
    case PairFamily::zero: return "zero";
    case PairFamily::gaussian: return "gaussian";
    case PairFamily::inverse_power_regularized: return "inverse_power_regularized";
  }
  return "?";
}

std::string to_string(Check c) {
  switch (c) {
    case Check::pass: return "pass";
    case Check::fail: return "fail";
    case Check::unchecked: return "unchecked";
  }
  return "?";
}

std::vector<double> evaluate_external(const ExternalPotentialSpec& spec, const Grid& grid) {
  const std::vector<double> r2 = grid.radius_squared();
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec.radial(std::sqrt(r2[i]));
  return out;
}

PairInteraction::PairInteraction(const PairPotentialSpec& spec, const Grid& grid)
    : spec_(spec), grid_(grid) {
  zero_ = spec.family == PairFamily::zero || spec.amplitude == 0.0;
  if (spec.family == PairFamily::gaussian && !(spec.width > 0.0))
    throw InvalidParameter("gaussian pair potential needs width > 0");
  if (spec.family == PairFamily::inverse_power_regularized && !(spec.decay > 0.0))
    throw InvalidParameter("inverse-power pair potential needs decay > 0");
  if (zero_) return;

  // Sample v at the periodic displacement lattice so that index 0 is zero shift.
  const std::size_t n = grid.n();
  const double h = grid.spacing();
  std::vector<double> disp2(grid.size(), 0.0);
  for (int a = 0; a < grid.dim(); ++a) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto m = static_cast<std::ptrdiff_t>(grid.axis_index(i, a));
      if (m >= static_cast<std::ptrdiff_t>(n / 2)) m -= static_cast<std::ptrdiff_t>(n);
      const double d = static_cast<double>(m) * h;
      disp2[i] += d * d;
    }
  }
  kernel_hat_.resize(grid.size());
  double l1 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double val = spec.radial(std::sqrt(disp2[i]));
    kernel_hat_[i] = val * grid.cell_volume();
    l1 += std::abs(val);
  }
  l1_ = l1 * grid.cell_volume();
  fft::forward(grid, kernel_hat_);

  const double v0 = std::abs(spec.radial(0.0));
  const double edge = std::abs(spec.radial(0.5 * grid.box_length()));
  wraps_ = v0 > 0.0 && edge / v0 > 1e-10;
}

void PairInteraction::effective_potential(std::span<const cplx> psi, std::span<double> out) const {
  if (psi.size() != grid_.size() || out.size() != grid_.size())
    throw DimensionMismatch("effective_potential: buffer size does not match grid");
  if (zero_) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  std::vector<cplx> rho(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
  fft::apply_multiplier(grid_, rho, kernel_hat_);
  double max_re = 0.0;
  double max_im = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    out[i] = rho[i].real();
    max_re = std::max(max_re, std::abs(rho[i].real()));
    max_im = std::max(max_im, std::abs(rho[i].imag()));
  }
  if (max_im > 1e-12 * max_re + std::numeric_limits<double>::min())
    throw Error("effective potential has an imaginary residue above 1e-12 of its amplitude");
}

EffectivePotentialField PairInteraction::effective_potential(const WaveFunction& psi,
                                                             double time) const {
  require_same_grid(grid_, psi.grid(), "effective_potential");
  EffectivePotentialField w{grid_, std::vector<double>(grid_.size()), time};
  effective_potential(psi.values(), w.values);
  return w;
}

EffectivePotentialField effective_potential(const PairPotentialSpec& v, const WaveFunction& psi) {
  return PairInteraction(v, psi.grid()).effective_potential(psi);
}

bool ConditionReport::all_pass() const {
  for (Check c : {v_integrability, v_smoothness, q_range, V_decay, V_negative_part_small,
                  V_positive_part_decay}) {
    if (c != Check::pass) return false;
  }
  return true;
}

namespace {

// sup over r >= 0 of f(r) <r>^alpha, sampled radially.
template <class F>
double radial_sup_weighted(F f, double alpha, double r_max) {
  constexpr int kSamples = 20000;
  double best = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double r = r_max * static_cast<double>(i) / kSamples;
    best = std::max(best, f(r) * std::pow(1.0 + r * r, 0.5 * alpha));
  }
  return best;
}

Check as_check(bool ok) { return ok ? Check::pass : Check::fail; }

}  // namespace

ConditionReport check_conditions(const ExternalPotentialSpec& V, const PairPotentialSpec& v, int dim) {
  ConditionReport rep;
  const double d = dim;
  const double q = v.lq_index;
  const double gamma = v.smoothness_index;

  rep.q_range = as_check(q >= 1.0 && q < d / 2.0);
  rep.v_smoothness_margin = gamma - d / (2.0 * q);
  rep.v_smoothness = as_check(rep.v_smoothness_margin > 0.0);
  switch (v.family) {
    case PairFamily::zero:
    case PairFamily::gaussian:
      rep.v_integrability = Check::pass;
      break;
    case PairFamily::inverse_power_regularized:
      // <x>^{-mu} lies in L^{q,infty} iff mu q >= d and in L^1 iff mu > d.
      rep.v_integrability = as_check(q > 1.0 ? v.decay * q >= d : v.decay > d);
      break;
  }
  if (q < 1.0) rep.notes.push_back("q < 1 is outside every branch of the pair-potential condition");

  const double sigma_min = 1.5 * d + 3.0;
  const double alpha = V.alpha;
  if (!(alpha > 2.0)) rep.notes.push_back("sign condition needs alpha > 2");
  switch (V.family) {
    case ExternalFamily::zero:
      rep.V_decay = Check::pass;
      rep.V_negative_part_small = as_check(alpha > 2.0);
      rep.V_positive_part_decay = as_check(alpha > 2.0);
      break;
    case ExternalFamily::inverse_power: {
      rep.V_decay = as_check(V.decay_rate >= sigma_min);
      const bool decays = V.decay_rate >= alpha;
      if (V.amplitude >= 0.0) {
        rep.V_negative_part_small = as_check(alpha > 2.0);
        rep.V_positive_part_decay = as_check(alpha > 2.0 && decays && V.amplitude <= V.positive_constant);
      } else {
        rep.V_positive_part_decay = as_check(alpha > 2.0);
        rep.V_negative_part_small = as_check(alpha > 2.0 && decays && -V.amplitude <= V.delta);
      }
      break;
    }
    case ExternalFamily::gaussian_well:
    case ExternalFamily::shielded_well: {
      rep.V_decay = Check::pass;
      const double r_max = 60.0 * std::max(V.width, V.shield_width);
      const double neg = radial_sup_weighted([&](double r) { return std::max(-V.radial(r), 0.0); },
                                             alpha, r_max);
      const double pos = radial_sup_weighted([&](double r) { return std::max(V.radial(r), 0.0); },
                                             alpha, r_max);
      rep.V_negative_part_small = as_check(alpha > 2.0 && neg <= V.delta);
      rep.V_positive_part_decay = as_check(alpha > 2.0 && pos <= V.positive_constant);
      break;
    }
  }
  return rep;
}

WtNorms wt_norms(const EffectivePotentialField& w) {
  const Grid& g = w.grid;
  WtNorms out;
  out.linf = kernels::max_abs(std::span<const double>(w.values));
  if (out.linf == 0.0) return out;

  std::vector<cplx> hat(w.values.begin(), w.values.end());
  fft::forward(g, hat);
  std::vector<std::vector<double>> k(static_cast<std::size_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) k[a] = g.axis_wavenumbers(a);

  auto derivative_sup = [&](int a, int b) {
    std::vector<cplx> buf = hat;
    for (std::size_t i = 0; i < buf.size(); ++i) {
      cplx m(0.0, k[a][i]);
      if (b >= 0) m *= cplx(0.0, k[b][i]);
      buf[i] *= m;
    }
    fft::inverse(g, buf);
    double s = 0.0;
    for (const cplx& z : buf) s = std::max(s, std::abs(z.real()));
    return s;
  };

  out.w1inf = out.linf;
  for (int a = 0; a < g.dim(); ++a) {
    const double da = derivative_sup(a, -1);
    out.grad_linf = std::max(out.grad_linf, da);
    out.w1inf += da;
    out.max_second = std::max(out.max_second, da);
    for (int b = a; b < g.dim(); ++b) out.max_second = std::max(out.max_second, derivative_sup(a, b));
  }
  return out;
}

}  // namespace hlc
