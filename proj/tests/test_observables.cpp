#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hlc/errors.hpp"
#include "hlc/observables.hpp"
#include "hlc/propagators.hpp"

using namespace hlc;

namespace {

WaveFunction constant(const Grid& g, double c) {
  WaveFunction psi(g);
  for (std::size_t i = 0; i < g.size(); ++i) psi[i] = c;
  return psi;
}

}  // namespace

TEST_CASE("tail mass of a constant field counts exterior cells") {
  const Grid g(1, 64, 32.0);  // x_j = -16 + j / 2
  // |x| >= 1 * 3 + 2 = 5: j <= 22 on the left (x <= -5) and j >= 42 on the right: 23 + 22 cells.
  const TailMass m = tail_mass(constant(g, 2.0), 3.0, ConeSpec{1.0, 2.0});
  CHECK_FALSE(m.box_limited);
  CHECK(m.value == doctest::Approx(std::sqrt(4.0 * 45 * 0.5)).epsilon(1e-14));
  // Radius at the box edge: nothing left to measure.
  CHECK(tail_mass(constant(g, 2.0), 14.0, ConeSpec{1.0, 2.0}).box_limited);
  CHECK_THROWS_AS(tail_mass(constant(g, 1.0), 0.0, ConeSpec{0.0, 1.0}), InvalidParameter);
}

TEST_CASE("tail mass is nonincreasing in the cone radius") {
  const Grid g(2, 32, 20.0);
  WaveFunction psi(g);
  const auto r2 = g.radius_squared();
  for (std::size_t i = 0; i < g.size(); ++i) psi[i] = std::exp(-r2[i] / 8);
  double prev = INFINITY;
  for (double t = 0; t < 8; t += 0.5) {
    const double m = tail_mass(psi, t, ConeSpec{1.0, 0.5}).value;
    CHECK(m <= prev);
    prev = m;
  }
}

TEST_CASE("decay fit recovers an exact power law in <t>") {
  std::vector<double> t, v;
  for (int i = 0; i <= 40; ++i) {
    t.push_back(0.5 * i);
    v.push_back(3.0 * std::pow(1 + t.back() * t.back(), -0.35));
  }
  const PowerLawFit f = decay_fit(t, v, 2.0, 20.0);
  CHECK(f.exponent == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK(f.amplitude == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.samples == 37);
  CHECK_THROWS_AS(decay_fit(t, v, 18.0, 20.0), InvalidParameter);
  v[30] = 0.0;
  CHECK_THROWS_AS(decay_fit(t, v, 2.0, 20.0), InvalidParameter);
}

TEST_CASE("power-law tail integral") {
  PowerLawFit f;
  f.amplitude = 2.0;
  f.exponent = -3.0;
  // int_T^inf (1 + r^2)^{-3/2} dr = 1 - T / sqrt(1 + T^2).
  const double T = 4.0;
  CHECK(power_law_tail(f, T) == doctest::Approx(2.0 * (1 - T / std::sqrt(1 + T * T))).epsilon(1e-8));
  f.exponent = -1.0;
  CHECK(std::isinf(power_law_tail(f, T)));
}

TEST_CASE("tail integrals of a sampled rate") {
  std::vector<double> t, rate;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(0.1 * i);
    rate.push_back(std::pow(1 + t.back() * t.back(), -1.5));
  }
  const TailIntegral w = tail_integral(t, rate);
  CHECK_FALSE(w.truncated);
  CHECK(w.fit.exponent == doctest::Approx(-3.0).epsilon(1e-2));
  for (std::size_t i : {0ul, 100ul, 250ul, 400ul}) {
    const double exact = 1 - t[i] / std::sqrt(1 + t[i] * t[i]);
    CHECK(w.values[i] == doctest::Approx(exact).epsilon(1e-3));
  }
  for (std::size_t i = 1; i < w.values.size(); ++i) CHECK(w.values[i] <= w.values[i - 1]);
}

TEST_CASE("propagation profile belongs to the admissible class") {
  const PropagationProfile f(0.5);
  CHECK(f(-1.0) == 0.0);
  CHECK(f(0.0) == 0.0);
  CHECK(f(0.5) == 1.0);
  CHECK(f(3.0) == 1.0);
  double prev = 0.0;
  for (int i = 1; i < 100; ++i) {
    const double u = 0.005 * i;
    CHECK(f(u) >= prev);
    prev = f(u);
    const double e = 1e-6;
    const double fd = (f(u + e) - f(u - e)) / (2 * e);
    CHECK(std::abs(f.derivative(u) - fd) < 1e-8 + 1e-6 * std::abs(fd));
    CHECK(f.sqrt_derivative(u) * f.sqrt_derivative(u) == doctest::Approx(f.derivative(u)).epsilon(1e-12));
  }
  const PropagationProfile one = PropagationProfile::constant_one();
  CHECK(one(-5.0) == 1.0);
  CHECK(one.derivative(0.3) == 0.0);
}

TEST_CASE("envelope fit") {
  const std::vector<double> w{1.0, 0.8, 0.5, 0.3, 0.1};
  std::vector<double> dphi;
  for (double wi : w) dphi.push_back(0.5 / 10.0 + 2.0 * wi);
  const EnvelopeFit e = fit_envelope(dphi, w, 10.0);
  CHECK(e.C == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(e.C_prime == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(e.max_excess <= 1e-12);

  const std::vector<double> negative{-1.0, -0.5, -0.2, -0.1, -0.3};
  const EnvelopeFit z = fit_envelope(negative, w, 10.0);
  CHECK(z.C == 0.0);
  CHECK(z.C_prime == 0.0);
  CHECK(z.max_excess <= 0.0);
}

TEST_CASE("propagation observable with the constant profile is the mass") {
  const Grid g(1, 64, 16.0);
  Trajectory traj;
  for (int k = 0; k < 4; ++k) {
    traj.times.push_back(k);
    traj.snapshots.push_back(constant(g, 1.0 + k));
  }
  PropagationObservableSpec spec;
  spec.constant_profile = true;
  spec.s = 4.0;
  const PropagationSeries p = propagation_observable(traj, spec);
  for (int k = 0; k < 4; ++k) {
    CHECK(p.phi[k] == doctest::Approx(16.0 * (1 + k) * (1 + k)));
    CHECK(p.norm_squared[k] == doctest::Approx(p.phi[k]));
  }
  // Centred difference of 16 (1 + t)^2 is exact: 32 (1 + t).
  CHECK(p.dphi[1] == doctest::Approx(64.0));
  CHECK(p.dphi[0] == doctest::Approx(48.0));
}

TEST_CASE("measure and the series CSV") {
  const Grid g(1, 64, 16.0);
  Trajectory traj;
  for (int k = 0; k < 3; ++k) {
    traj.times.push_back(k);
    traj.snapshots.push_back(constant(g, 0.5));
  }
  ObservableSpec spec;
  spec.p_list = {2.0, INFINITY};
  spec.cones = {ConeSpec{1.0, 2.0}};
  const ObservableSeries s = measure(traj, spec);
  CHECK(s.l2[0] == doctest::Approx(0.5 * std::sqrt(16.0)));
  CHECK(s.lp[1][2] == doctest::Approx(0.5));
  CHECK(s.W_linf[1] == 0.0);
  CHECK(lp_column(INFINITY) == "lp_inf");
  CHECK(lp_column(4.0) == "lp_4");
  CHECK(tail_column(ConeSpec{1.25, 18.0}) == "tail_1.25_18");

  std::ostringstream out;
  write_series_csv(out, s, "0123456789abcdef");
  std::istringstream in(out.str());
  std::string first, header;
  std::getline(in, first);
  std::getline(in, header);
  CHECK(first == "# config_hash: 0123456789abcdef");
  CHECK(header.rfind("t,", 0) == 0);
  CHECK(header.find("tail_1_2") != std::string::npos);
}
