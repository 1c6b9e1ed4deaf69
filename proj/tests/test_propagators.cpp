#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "hlc/errors.hpp"
#include "hlc/operators.hpp"
#include "hlc/propagators.hpp"

using namespace hlc;

namespace {

// Free evolution of exp(-x^2/(2 s^2) + i k0 x) under -1/2 d^2/dx^2.
cplx free_gaussian(double x, double t, double s, double k0) {
  const cplx z = cplx(s * s, t);
  return std::sqrt(s * s / z) * std::exp(-(x - k0 * t) * (x - k0 * t) / (2.0 * z) + cplx(0, k0 * x - 0.5 * k0 * k0 * t));
}

WaveFunction gaussian(const Grid& g, double s, double k0, double x0 = 0.0) {
  WaveFunction psi(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coordinate(i) - x0;
    psi[i] = std::exp(-x * x / (2 * s * s)) * std::polar(1.0, k0 * x);
  }
  return psi;
}

const ExternalPotentialSpec kWell{ExternalFamily::gaussian_well, -0.8, 0.0, 1.5};

}  // namespace

TEST_CASE("free Gaussian matches the closed form") {
  const Grid g(1, 1024, 160.0);
  StepperConfig cfg;
  cfg.dt = 0.01;
  cfg.record_stride = 250;
  const auto traj = evolve_linear(HamiltonianOp(g), gaussian(g, 1.5, 1.0), 10.0, cfg);
  REQUIRE(traj.times.size() == 5);
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    WaveFunction exact(g);
    for (std::size_t i = 0; i < g.size(); ++i) exact[i] = free_gaussian(g.coordinate(i), traj.times[r], 1.5, 1.0);
    CHECK(l2_norm(traj.snapshots[r] - exact) < 1e-10 * l2_norm(exact));
  }
}

TEST_CASE("linear, Hartree and NLS flows conserve the L2 norm") {
  const Grid g(1, 256, 40.0);
  const HamiltonianOp h(g, kWell);
  const WaveFunction psi0 = gaussian(g, 1.0, 0.5, 2.0);
  const double n0 = l2_norm(psi0);
  StepperConfig cfg;
  cfg.dt = 0.01;
  cfg.record_stride = 100;
  for (const auto& traj : {evolve_linear(h, psi0, 5.0, cfg),
                           evolve_hartree(h, PairPotentialSpec{PairFamily::gaussian, 0.5, 1.0}, psi0, 5.0, cfg),
                           evolve_nls(h, 1.0, psi0, 5.0, cfg, -0.5)}) {
    for (const auto& s : traj.snapshots) CHECK(std::abs(l2_norm(s) - n0) < 1e-12 * n0);
  }
}

TEST_CASE("Strang splitting is second order") {
  const Grid g(1, 128, 40.0);
  const HamiltonianOp h(g, kWell);
  const WaveFunction psi0 = gaussian(g, 1.0, 0.5, 2.0);
  auto final_state = [&](double dt) {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.record_stride = step_count(2.0, dt);
    return evolve_linear(h, psi0, 2.0, cfg).snapshots.back();
  };
  const WaveFunction ref = final_state(0.05 / 64);
  const double e1 = l2_norm(final_state(0.05) - ref);
  const double e2 = l2_norm(final_state(0.025) - ref);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("time-dependent linear flow: backward step inverts the forward step") {
  const Grid g(1, 256, 40.0);
  const HamiltonianOp h(g, kWell);
  StepperConfig cfg;
  cfg.dt = 0.01;
  cfg.record_stride = 1;
  cfg.potential_stride = 1;
  const WaveFunction psi0 = gaussian(g, 1.0, 0.5, 2.0);
  const auto traj = evolve_hartree(h, PairPotentialSpec{PairFamily::gaussian, 1.0, 1.0}, psi0, 3.0, cfg);
  const WaveFunction phi = gaussian(g, 2.0, -1.0, -3.0);
  const WaveFunction fwd = evolve_td_linear(h, traj.effective_potentials, phi, 0.0, 3.0, cfg);
  const WaveFunction back = evolve_td_linear(h, traj.effective_potentials, fwd, 3.0, 0.0, cfg);
  CHECK(l2_norm(back - phi) < 1e-12 * l2_norm(phi));
  // Driven by its own potential, the td-linear flow reproduces the Hartree solution.
  const WaveFunction self = evolve_td_linear(h, traj.effective_potentials, psi0, 0.0, 3.0, cfg);
  CHECK(l2_norm(self - traj.snapshots.back()) < 1e-3 * l2_norm(psi0));
  CHECK_THROWS_AS(evolve_td_linear(h, traj.effective_potentials, phi, 0.0, 4.0, cfg), CoverageError);
}

TEST_CASE("potential series interpolates linearly in time") {
  const Grid g(1, 8, 1.0);
  PotentialSeries s;
  s.push_back({g, std::vector<double>(8, 1.0), 0.0});
  s.push_back({g, std::vector<double>(8, 3.0), 2.0});
  std::vector<double> out(8);
  s.interpolate(0.5, out);
  CHECK(out[3] == doctest::Approx(1.5));
  s.interpolate(5.0, out);
  CHECK(out[0] == 3.0);
  CHECK(s.covers(0.0, 2.0));
  CHECK_FALSE(s.covers(0.0, 2.5));
  CHECK_FALSE(s.identically_zero());
  CHECK_THROWS_AS(s.push_back({g, std::vector<double>(8, 0.0), 1.0}), InvalidParameter);
}

TEST_CASE("step bookkeeping and parameter checks") {
  CHECK(step_count(1.0, 0.1) == 10);
  CHECK(step_count(1.0, 0.3) == 4);
  CHECK(step_count(0.0, 0.1) == 0);
  const Grid g(1, 64, 4.0);
  StepperConfig cfg;
  cfg.dt = 10.0;
  CHECK_THROWS_AS(evolve_linear(HamiltonianOp(g), gaussian(g, 0.5, 0.0), 10.0, cfg), InvalidParameter);
  cfg.dt = 0.01;
  cfg.record_stride = 7;
  CHECK_THROWS_AS(evolve_linear(HamiltonianOp(g), gaussian(g, 0.5, 0.0), 1.0, cfg), InvalidParameter);
}
