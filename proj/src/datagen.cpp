#include "hlc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hlc/errors.hpp"
#include "hlc/smooth.hpp"

namespace hlc {

double SpatialCutoff::profile(double r) { return 1.0 - smooth_step(2.0 * r - 1.0); }

WaveFunction localize(const WaveFunction& phi, const SpatialCutoff& cutoff) {
  if (!(cutoff.radius > 0.0)) throw InvalidParameter("localization radius b must be > 0");
  WaveFunction out = phi;
  const auto rr = phi.grid().radius_squared();
  for (std::size_t i = 0; i < rr.size(); ++i) out[i] *= cutoff(std::sqrt(rr[i]));
  return out;
}

namespace {

void check_job(const CutoffJob& job) {
  if (!(job.tau_max >= 1.0)) throw InvalidParameter("cutoff job needs tau_max >= 1");
  if (!(job.tol_tail > 0.0)) throw InvalidParameter("cutoff job needs tol_tail > 0");
}

double combined_norm(const WaveFunction& psi, double s, double gamma) {
  return sobolev_norm(psi, s) + weighted_norm(psi, gamma);
}

/// ||phi|| int_T^inf ||[g(H), W_r]|| dr from power-law fits of W norms over
/// the last half of the horizon.
TailCertificate certify_tail(const CutoffJob& job, const HamiltonianOp& h, const PotentialSeries& w,
                             double phi_norm) {
  TailCertificate cert;
  if (w.identically_zero()) return cert;
  const double T = job.tau_max;

  std::vector<double> times;
  std::vector<double> sup;
  std::vector<double> second;
  // About 200 samples are plenty for a two-parameter fit.
  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.fields()[i].time >= 0.5 * T - 1e-12 && w.fields()[i].time <= T + 1e-12) picks.push_back(i);
  }
  const std::size_t stride = std::max<std::size_t>(1, picks.size() / 200);
  for (std::size_t k = 0; k < picks.size(); k += stride) {
    const auto& field = w.fields()[picks[k]];
    const WtNorms n = wt_norms(field);
    times.push_back(field.time);
    sup.push_back(n.linf);
    second.push_back(n.max_second);
  }

  double best = std::numeric_limits<double>::infinity();
  cert.route = "none";
  try {
    cert.sup_fit = decay_fit(times, sup, 0.5 * T, T);
    const double b = 2.0 * power_law_tail(cert.sup_fit, T);
    if (b < best) {
      best = b;
      cert.route = "sup";
    }
  } catch (const InvalidParameter&) {
    cert.sup_fit.flags.push_back("fit_failed");
  }
  try {
    cert.derivative_fit = decay_fit(times, second, 0.5 * T, T);
    const double integral = power_law_tail(cert.derivative_fit, T);
    if (std::isfinite(integral)) {
      std::vector<double> field(h.grid().size());
      for (int j = 0; j < job.commutator_samples; ++j) {
        const double r = T * (0.5 + 0.5 * (j + 1.0) / job.commutator_samples);
        w.interpolate(r, field);
        const CommutatorEstimate c = commutator_norm(h, job.window, field, job.commutator);
        if (c.derivative_bound > 0.0)
          cert.commutator_constant = std::max(cert.commutator_constant, c.norm / c.derivative_bound);
      }
      const double b = cert.commutator_constant * integral;
      if (b < best) {
        best = b;
        cert.route = "derivative";
      }
    }
  } catch (const InvalidParameter&) {
    cert.derivative_fit.flags.push_back("fit_failed");
  }
  cert.bound = phi_norm * best;
  cert.converged = cert.bound <= job.tol_tail;
  return cert;
}

}  // namespace

PotentialSeries hartree_potentials(const CutoffJob& job, const HamiltonianOp& h, const WaveFunction& psi0) {
  check_job(job);
  const PairInteraction pair(job.pair, psi0.grid());
  if (pair.is_zero()) {
    const std::vector<double> zero(psi0.size(), 0.0);
    return PotentialSeries({{psi0.grid(), zero, 0.0}, {psi0.grid(), zero, job.tau_max}});
  }
  StepperConfig cfg = job.stepper;
  cfg.record_stride = std::max(1, step_count(job.tau_max, cfg.dt));
  cfg.potential_stride = 1;
  Trajectory traj = evolve_hartree(h, pair, psi0, job.tau_max, cfg);
  return std::move(traj.effective_potentials);
}

CutoffResult asymptotic_cutoff(const CutoffJob& job, const HamiltonianOp& h,
                               const PotentialSeries& hartree, const WaveFunction& phi) {
  check_job(job);
  require_same_grid(h.grid(), phi.grid(), "asymptotic_cutoff");
  const auto p = ChebyshevExpansion::to_tolerance(job.window, h.lower_bound(), h.upper_bound(), job.cheb_tol);
  if (hartree.identically_zero()) {
    if (!hartree.covers(0.0, job.tau_max))
      throw CoverageError("potential series does not cover [0, tau_max]");
    // e^{-i tau H} commutes with g(H): the conjugation is the identity, and
    // skipping it avoids the splitting error of a discrete round trip.
    CutoffResult out{WaveFunction(phi.grid()), {}, p.tail_bound() * l2_norm(phi)};
    p.apply(h, phi.values(), out.value.values());
    out.tail = certify_tail(job, h, hartree, l2_norm(phi));
    return out;
  }
  const WaveFunction forward = evolve_td_linear(h, hartree, phi, 0.0, job.tau_max, job.stepper);
  WaveFunction windowed(phi.grid());
  p.apply(h, forward.values(), windowed.values());
  CutoffResult out{evolve_td_linear(h, hartree, windowed, job.tau_max, 0.0, job.stepper), {}, 0.0};
  out.cheb_error = p.tail_bound() * l2_norm(forward);
  out.tail = certify_tail(job, h, hartree, l2_norm(phi));
  return out;
}

CutoffResult asymptotic_cutoff(const CutoffJob& job, const HamiltonianOp& h, const WaveFunction& psi0,
                               const WaveFunction& phi) {
  return asymptotic_cutoff(job, h, hartree_potentials(job, h, psi0), phi);
}

GammaAdmissibility gamma_admissibility(double gamma, int dim, double q) {
  GammaAdmissibility g;
  g.lower = dim / (2.0 * q);
  g.upper = dim / q - 1.0;
  g.admissible = gamma > g.lower && gamma < g.upper;
  return g;
}

WaveFunction prepare_input(const HamiltonianOp& h, const DataGenSpec& spec) {
  require_same_grid(h.grid(), spec.seed.grid(), "prepare_input");
  if (!(spec.epsilon > 0.0)) throw InvalidParameter("data amplitude epsilon must be > 0");
  const WaveFunction local = localize(spec.seed, SpatialCutoff{spec.b});
  const auto p = ChebyshevExpansion::to_tolerance(spec.job.window, h.lower_bound(), h.upper_bound(),
                                                  spec.job.cheb_tol);
  WaveFunction out(local.grid());
  p.apply(h, local.values(), out.values());
  const double norm = sobolev_norm(out, spec.s);
  if (!(norm > 0.0)) throw InvalidParameter("seed has no component in the energy window after localization");
  out *= spec.epsilon / norm;
  return out;
}

DatumResult construct_datum(const HamiltonianOp& h, const DataGenSpec& spec) {
  if (!(spec.fp_tol > 0.0)) throw InvalidParameter("fp_tol must be > 0");
  if (spec.max_iters < 1) throw InvalidParameter("max_iters must be >= 1");
  const Grid& grid = spec.seed.grid();
  DatumResult out(grid);
  out.gamma_check = gamma_admissibility(spec.gamma, grid.dim(), spec.job.pair.lq_index);
  out.phi_input = prepare_input(h, spec);

  const auto p = ChebyshevExpansion::to_tolerance(spec.job.window, h.lower_bound(), h.upper_bound(),
                                                  spec.job.cheb_tol);
  WaveFunction psi(grid);
  p.apply(h, out.phi_input.values(), psi.values());

  for (int n = 1; n <= spec.max_iters; ++n) {
    CutoffResult next = asymptotic_cutoff(spec.job, h, psi, out.phi_input);
    out.certificates.push_back(next.tail);
    if (!next.tail.converged)
      throw ToleranceNotMet("tail certificate " + std::to_string(next.tail.bound) + " exceeds tol_tail " +
                                std::to_string(spec.job.tol_tail) + " at iteration " + std::to_string(n),
                            next.tail.bound);
    const double d = combined_norm(next.value - psi, spec.s, spec.gamma);
    if (!out.increments.empty() && out.increments.back() > 0.0) out.ratios.push_back(d / out.increments.back());
    out.increments.push_back(d);
    psi = std::move(next.value);
    out.iterations = n;
    out.residual = d;
    if (d < spec.fp_tol) {
      out.psi0 = std::move(psi);
      return out;
    }
  }
  throw NonConvergence("fixed point not reached in " + std::to_string(spec.max_iters) +
                           " iterations; last increment " + std::to_string(out.residual),
                       out.ratios);
}

InjectivityReport injectivity_probe(const HamiltonianOp& h, const DataGenSpec& spec,
                                    const WaveFunction& phi1, const WaveFunction& phi2) {
  InjectivityReport r(phi1.grid());
  DataGenSpec s1 = spec;
  s1.seed = phi1;
  DataGenSpec s2 = spec;
  s2.seed = phi2;
  r.first = construct_datum(h, s1);
  r.second = construct_datum(h, s2);
  r.output_difference = sobolev_norm(r.first.psi0 - r.second.psi0, spec.s);
  const auto p = ChebyshevExpansion::to_tolerance(spec.job.window, h.lower_bound(), h.upper_bound(),
                                                  spec.job.cheb_tol);
  const WaveFunction diff = r.first.phi_input - r.second.phi_input;
  WaveFunction g_diff(diff.grid());
  p.apply(h, diff.values(), g_diff.values());
  r.input_difference = sobolev_norm(g_diff, spec.s);
  r.ratio = r.input_difference > 0.0 ? r.output_difference / r.input_difference : 0.0;
  return r;
}

}  // namespace hlc
