#include "hlc/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "hlc/errors.hpp"
#include "hlc/fft.hpp"
#include "hlc/kernels.hpp"

namespace hlc {

namespace {

class SplitStepper {
 public:
  SplitStepper(const HamiltonianOp& h, double dt) : h_(h), dt_(dt), kinetic_phase_(h.grid().size()) {
    const auto k = h.kinetic();
    for (std::size_t i = 0; i < k.size(); ++i) kinetic_phase_[i] = std::polar(1.0, -dt * k[i]);
  }

  void kinetic(std::span<cplx> psi) const {
    fft::apply_multiplier(h_.grid(), psi, std::span<const cplx>(kinetic_phase_));
  }

  /// psi *= exp(-i dt/2 (V + w)); `w` may be empty.
  void half_potential(std::span<cplx> psi, std::span<const double> w) const {
    if (!h_.has_potential() && w.empty()) return;
    kernels::apply_phase(psi, h_.potential(), w, 0.5 * dt_);
  }

 private:
  const HamiltonianOp& h_;
  double dt_;
  std::vector<cplx> kinetic_phase_;
};

void check_phase_bound(const HamiltonianOp& h, double dt, const StepperConfig& cfg) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("time step must be positive");
  if (cfg.enforce_phase_bound && dt * h.upper_bound() > std::numbers::pi)
    throw InvalidParameter("time step too large: dt * lambda_max = " +
                           std::to_string(dt * h.upper_bound()) + " exceeds pi");
}

void check_stride(int steps, int stride, const char* what) {
  if (stride < 1) throw InvalidParameter(std::string(what) + " must be >= 1");
  if (steps % stride != 0)
    throw InvalidParameter(std::string(what) + " " + std::to_string(stride) +
                           " does not divide the step count " + std::to_string(steps));
}

using Nonlinearity = std::function<void(std::span<const cplx>, std::span<double>)>;

// Shared driver for linear, Hartree and NLS runs. The potential phase
// preserves |psi|, so W evaluated after the kinetic step equals W at the end
// of the step and is reused as the first half-step of the next one.
Trajectory evolve_split(const HamiltonianOp& h, const Nonlinearity& nonlinearity,
                        const WaveFunction& psi0, double T, const StepperConfig& cfg) {
  require_same_grid(h.grid(), psi0.grid(), "evolve");
  if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidParameter("evolution horizon must be >= 0");
  const int steps = step_count(T, cfg.dt);
  const double dt = steps > 0 ? T / steps : cfg.dt;
  check_phase_bound(h, dt, cfg);
  const int w_stride = cfg.potential_stride > 0 ? cfg.potential_stride : cfg.record_stride;
  check_stride(steps, cfg.record_stride, "record_stride");
  if (nonlinearity) check_stride(steps, w_stride, "potential_stride");

  const SplitStepper stepper(h, dt);
  const Grid& grid = psi0.grid();
  Trajectory traj;
  WaveFunction psi = psi0;
  std::vector<double> w;
  if (nonlinearity) {
    w.resize(grid.size());
    nonlinearity(psi.values(), w);
    traj.effective_potentials.push_back({grid, w, 0.0});
  }
  traj.times.push_back(0.0);
  traj.snapshots.push_back(psi);

  const double norm0 = l2_norm(psi0);
  for (int step = 1; step <= steps; ++step) {
    stepper.half_potential(psi.values(), w);
    stepper.kinetic(psi.values());
    if (nonlinearity) nonlinearity(psi.values(), w);
    stepper.half_potential(psi.values(), w);

    const double t = step * dt;
    if (nonlinearity && step % w_stride == 0) traj.effective_potentials.push_back({grid, w, t});
    if (step % cfg.record_stride == 0) {
      if (nonlinearity && norm0 > 0.0) {
        const double drift = std::abs(l2_norm(psi) - norm0) / norm0;
        if (!(drift <= cfg.drift_tolerance))
          throw BlowUp("L2 drift " + std::to_string(drift) + " at t = " + std::to_string(t), t, drift);
      }
      traj.times.push_back(t);
      traj.snapshots.push_back(psi);
    }
  }
  return traj;
}

}  // namespace

int step_count(double span, double dt) {
  if (!(dt > 0.0)) throw InvalidParameter("time step must be positive");
  if (span <= 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
}

PotentialSeries::PotentialSeries(std::vector<EffectivePotentialField> fields)
    : fields_(std::move(fields)) {
  for (std::size_t i = 1; i < fields_.size(); ++i) {
    if (!(fields_[i].time > fields_[i - 1].time))
      throw InvalidParameter("potential series times must be strictly increasing");
  }
}

double PotentialSeries::first_time() const {
  if (fields_.empty()) throw CoverageError("empty potential series");
  return fields_.front().time;
}

double PotentialSeries::last_time() const {
  if (fields_.empty()) throw CoverageError("empty potential series");
  return fields_.back().time;
}

bool PotentialSeries::covers(double t0, double t1) const {
  if (fields_.empty()) return false;
  const double lo = std::min(t0, t1);
  const double hi = std::max(t0, t1);
  const double slack = 1e-9 * std::max(1.0, std::abs(last_time()));
  return lo >= first_time() - slack && hi <= last_time() + slack;
}

void PotentialSeries::push_back(EffectivePotentialField field) {
  if (!fields_.empty() && !(field.time > fields_.back().time))
    throw InvalidParameter("potential series times must be strictly increasing");
  fields_.push_back(std::move(field));
}

void PotentialSeries::interpolate(double t, std::span<double> out) const {
  if (fields_.empty()) throw CoverageError("empty potential series");
  if (fields_.size() == 1 || t <= fields_.front().time) {
    std::copy(fields_.front().values.begin(), fields_.front().values.end(), out.begin());
    return;
  }
  if (t >= fields_.back().time) {
    std::copy(fields_.back().values.begin(), fields_.back().values.end(), out.begin());
    return;
  }
  auto it = std::upper_bound(fields_.begin(), fields_.end(), t,
                             [](double tt, const EffectivePotentialField& f) { return tt < f.time; });
  const auto& right = *it;
  const auto& left = *(it - 1);
  const double theta = (t - left.time) / (right.time - left.time);
  // Exact node hits avoid mixing in the neighbour.
  if (theta <= 1e-12) {
    std::copy(left.values.begin(), left.values.end(), out.begin());
    return;
  }
  if (theta >= 1.0 - 1e-12) {
    std::copy(right.values.begin(), right.values.end(), out.begin());
    return;
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - theta) * left.values[i] + theta * right.values[i];
}

bool PotentialSeries::identically_zero() const {
  for (const auto& f : fields_) {
    for (double v : f.values) {
      if (v != 0.0) return false;
    }
  }
  return true;
}

Trajectory evolve_linear(const HamiltonianOp& h, const WaveFunction& psi0, double T,
                         const StepperConfig& cfg) {
  return evolve_split(h, nullptr, psi0, T, cfg);
}

Trajectory evolve_hartree(const HamiltonianOp& h, const PairInteraction& v, const WaveFunction& psi0,
                          double T, const StepperConfig& cfg) {
  require_same_grid(v.grid(), psi0.grid(), "evolve_hartree");
  const Nonlinearity w = [&v](std::span<const cplx> psi, std::span<double> out) {
    v.effective_potential(psi, out);
  };
  return evolve_split(h, w, psi0, T, cfg);
}

Trajectory evolve_hartree(const HamiltonianOp& h, const PairPotentialSpec& v,
                          const WaveFunction& psi0, double T, const StepperConfig& cfg) {
  return evolve_hartree(h, PairInteraction(v, psi0.grid()), psi0, T, cfg);
}

Trajectory evolve_nls(const HamiltonianOp& h, double sigma, const WaveFunction& psi0, double T,
                      const StepperConfig& cfg, double coupling) {
  if (!(sigma > 0.0)) throw InvalidParameter("NLS power sigma must be > 0");
  const Nonlinearity w = [sigma, coupling](std::span<const cplx> psi, std::span<double> out) {
    kernels::modulus_power(psi, coupling, sigma, out);
  };
  return evolve_split(h, w, psi0, T, cfg);
}

WaveFunction evolve_td_linear(const HamiltonianOp& h, const PotentialSeries& w_series,
                              const WaveFunction& phi, double t_from, double t_to,
                              const StepperConfig& cfg) {
  require_same_grid(h.grid(), phi.grid(), "evolve_td_linear");
  if (!w_series.covers(t_from, t_to))
    throw CoverageError("potential series does not cover [" + std::to_string(std::min(t_from, t_to)) +
                        ", " + std::to_string(std::max(t_from, t_to)) + "]");
  if (!(w_series.fields().front().grid == phi.grid()))
    throw DimensionMismatch("evolve_td_linear: potential series lives on a different grid");
  const double span = t_to - t_from;
  const int steps = step_count(std::abs(span), cfg.dt);
  WaveFunction psi = phi;
  if (steps == 0) return psi;
  const double dt = span / steps;
  check_phase_bound(h, std::abs(dt), cfg);

  // For dt < 0 the same formula is the exact inverse of the forward step.
  const SplitStepper stepper(h, dt);
  std::vector<double> w_now(phi.size());
  std::vector<double> w_next(phi.size());
  w_series.interpolate(t_from, w_now);
  for (int step = 0; step < steps; ++step) {
    const double t_next = step + 1 == steps ? t_to : t_from + (step + 1) * dt;
    w_series.interpolate(t_next, w_next);
    stepper.half_potential(psi.values(), w_now);
    stepper.kinetic(psi.values());
    stepper.half_potential(psi.values(), w_next);
    std::swap(w_now, w_next);
  }
  return psi;
}

}  // namespace hlc
