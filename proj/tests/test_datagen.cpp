#include <doctest.h>

#include <cmath>

#include "hlc/datagen.hpp"
#include "hlc/errors.hpp"

using namespace hlc;

namespace {

const ExternalPotentialSpec kWell{ExternalFamily::gaussian_well, -0.3, 0.0, 1.0};

WaveFunction packet(const Grid& g, double width, double k0, double x0) {
  WaveFunction psi(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coordinate(i) - x0;
    psi[i] = std::exp(-x * x / (2 * width * width)) * std::polar(1.0, k0 * x);
  }
  return psi;
}

CutoffJob small_job(const PairPotentialSpec& pair) {
  CutoffJob job;
  job.window = SpectralWindow::from_plateau(0.25, 1.25, 0.2);
  job.pair = pair;
  job.tau_max = 6.0;
  job.stepper.dt = 0.01;
  job.cheb_tol = 1e-12;
  return job;
}

}  // namespace

TEST_CASE("spatial cutoff profile and localization") {
  CHECK(SpatialCutoff::profile(0.0) == 1.0);
  CHECK(SpatialCutoff::profile(0.5) == 1.0);
  CHECK(SpatialCutoff::profile(1.0) == 0.0);
  CHECK(SpatialCutoff::profile(3.0) == 0.0);
  CHECK(SpatialCutoff::profile(0.75) == doctest::Approx(0.5).epsilon(1e-14));
  double prev = 1.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = 0.5 + 0.005 * i;
    CHECK(SpatialCutoff::profile(r) <= prev);
    prev = SpatialCutoff::profile(r);
  }

  const Grid g(1, 64, 32.0);
  WaveFunction one(g);
  for (std::size_t i = 0; i < g.size(); ++i) one[i] = 1.0;
  const WaveFunction loc = localize(one, SpatialCutoff{4.0});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = std::abs(g.coordinate(i));
    if (x <= 2.0) CHECK(loc[i] == cplx(1.0));
    if (x >= 4.0) CHECK(loc[i] == cplx(0.0));
    CHECK(loc[i].real() == doctest::Approx(SpatialCutoff::profile(x / 4.0)).epsilon(1e-15));
  }
}

TEST_CASE("gamma admissibility interval") {
  const auto a = gamma_admissibility(1.75, 3, 1.0);
  CHECK(a.lower == doctest::Approx(1.5));
  CHECK(a.upper == doctest::Approx(2.0));
  CHECK(a.admissible);
  CHECK_FALSE(gamma_admissibility(1.5, 3, 1.0).admissible);
  // Empty in one dimension: d/(2q) >= d/q - 1 for q >= 1.
  CHECK_FALSE(gamma_admissibility(0.4, 1, 1.0).admissible);
}

TEST_CASE("with v = 0 the asymptotic cutoff is g(H)") {
  const Grid g(1, 256, 64.0);
  const HamiltonianOp h(g, kWell);
  const CutoffJob job = small_job(PairPotentialSpec{});
  const WaveFunction phi = packet(g, 2.0, 0.9, 3.0);
  const CutoffResult r = asymptotic_cutoff(job, h, phi, phi);
  const auto direct = apply_window_cheb_auto(h, job.window, phi, 1e-12);
  CHECK(l2_norm(r.value - direct.value) < 1e-10 * l2_norm(phi));
  CHECK(r.tail.route == "zero");
  CHECK(r.tail.bound == 0.0);
  CHECK(r.tail.converged);
  const PotentialSeries w = hartree_potentials(job, h, phi);
  CHECK(w.identically_zero());
  CHECK(w.covers(0.0, job.tau_max));
}

TEST_CASE("the cutoff map is linear and contractive for a fixed W series") {
  const Grid g(1, 256, 64.0);
  const HamiltonianOp h(g, kWell);
  CutoffJob job = small_job(PairPotentialSpec{PairFamily::gaussian, 0.5, 1.0});
  job.tol_tail = INFINITY;
  const WaveFunction psi0 = packet(g, 1.5, 0.8, 0.0);
  const PotentialSeries w = hartree_potentials(job, h, psi0);
  REQUIRE_FALSE(w.identically_zero());
  const WaveFunction a = packet(g, 2.0, 0.9, 3.0);
  const WaveFunction b = packet(g, 1.0, -0.6, -5.0);
  const cplx alpha(0.3, -1.2), beta(2.0, 0.5);
  const CutoffResult ra = asymptotic_cutoff(job, h, w, a);
  const CutoffResult rb = asymptotic_cutoff(job, h, w, b);
  const CutoffResult rab = asymptotic_cutoff(job, h, w, alpha * a + beta * b);
  CHECK(l2_norm(rab.value - (alpha * ra.value + beta * rb.value)) < 1e-10 * l2_norm(rab.value));
  // 0 <= g <= 1 and unitary conjugation: ||g_tau(H) phi|| <= ||phi||.
  CHECK(l2_norm(ra.value) <= l2_norm(a) + ra.cheb_error);
  CHECK(l2_norm(rb.value) <= l2_norm(b) + rb.cheb_error);
  CHECK(ra.tail.route != "zero");
}

TEST_CASE("prepared input has H^s norm epsilon") {
  const Grid g(1, 256, 64.0);
  const HamiltonianOp h(g, kWell);
  DataGenSpec spec(packet(g, 3.0, 0.8, 0.0));
  spec.job = small_job(PairPotentialSpec{});
  spec.b = 12.0;
  spec.epsilon = 0.07;
  spec.s = 1.5;
  CHECK(sobolev_norm(prepare_input(h, spec), 1.5) == doctest::Approx(0.07).epsilon(1e-12));
  DataGenSpec zero{WaveFunction(g)};
  zero.job = spec.job;
  CHECK_THROWS_AS(prepare_input(h, zero), InvalidParameter);
}

TEST_CASE("datum for v = 0 is g(H) phi_input after one iteration") {
  const Grid g(1, 256, 64.0);
  const HamiltonianOp h(g, kWell);
  DataGenSpec spec(packet(g, 3.0, 0.8, 0.0));
  spec.job = small_job(PairPotentialSpec{});
  spec.b = 12.0;
  const DatumResult d = construct_datum(h, spec);
  CHECK(d.iterations == 1);
  CHECK(d.residual < spec.fp_tol);
  const auto gphi = apply_window_cheb_auto(h, spec.job.window, d.phi_input, 1e-12);
  CHECK(l2_norm(d.psi0 - gphi.value) < 1e-10 * l2_norm(d.phi_input));
}

TEST_CASE("an unattainable tail tolerance is reported, not ignored") {
  const Grid g(1, 256, 64.0);
  const HamiltonianOp h(g, kWell);
  DataGenSpec spec(packet(g, 3.0, 0.8, 0.0));
  spec.job = small_job(PairPotentialSpec{PairFamily::gaussian, 0.5, 1.0});
  spec.job.tol_tail = 1e-30;
  spec.b = 12.0;
  CHECK_THROWS_AS(construct_datum(h, spec), ToleranceNotMet);
}

TEST_CASE("injectivity probe with identical inputs") {
  const Grid g(1, 256, 64.0);
  const HamiltonianOp h(g, kWell);
  DataGenSpec spec(packet(g, 3.0, 0.8, 0.0));
  spec.job = small_job(PairPotentialSpec{});
  spec.b = 12.0;
  const WaveFunction phi = packet(g, 3.0, 0.8, 0.0);
  const InjectivityReport same = injectivity_probe(h, spec, phi, phi);
  CHECK(same.output_difference == 0.0);
  CHECK(same.ratio == 0.0);
  // For v = 0 the map is g(H) itself, so output and input differences coincide.
  const InjectivityReport diff = injectivity_probe(h, spec, phi, packet(g, 2.0, 0.5, 4.0));
  CHECK(diff.input_difference > 0.0);
  CHECK(diff.ratio == doctest::Approx(1.0).epsilon(1e-8));
}
