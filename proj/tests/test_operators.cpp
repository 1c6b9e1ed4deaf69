#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hlc/lanczos.hpp"
#include "hlc/operators.hpp"
#include "support/dense_oracle.hpp"

using namespace hlc;
using namespace hlc::testing;
using std::numbers::pi;

namespace {

const ExternalPotentialSpec kWell{ExternalFamily::gaussian_well, -1.0, 0.0, 1.0};

}  // namespace

TEST_CASE("matrix-free H equals the explicit DFT-sum Hamiltonian") {
  const Grid g(1, 32, 12.0);
  const HamiltonianOp h(g, kWell);
  const Matrix explicit_h = explicit_hamiltonian_1d(g, h.potential());
  const Matrix applied = assemble(g.size(), [&](std::span<const cplx> x, std::span<cplx> y) { h.apply(x, y); });
  CHECK((applied - explicit_h).norm() < 1e-12 * explicit_h.norm());
  CHECK((applied - applied.adjoint()).norm() < 1e-12 * applied.norm());
}

TEST_CASE("spectral enclosure contains the dense spectrum") {
  const Grid g(1, 64, 16.0);
  const HamiltonianOp h(g, kWell);
  const DenseSpectrum dense(h);
  CHECK(h.lower_bound() <= dense.eigenvalues()(0));
  CHECK(h.upper_bound() >= dense.eigenvalues()(63));
  const SpectralRange r = spectral_range(h, 1e-9);
  CHECK(r.lambda_min == doctest::Approx(dense.eigenvalues()(0)).epsilon(1e-9));
  CHECK(r.lambda_max == doctest::Approx(dense.eigenvalues()(63)).epsilon(1e-9));
}

TEST_CASE("bound states: attractive well in 1D has one, repulsive barrier has none") {
  const Grid g(1, 128, 40.0);
  const BoundStateReport att = bound_state_check(HamiltonianOp(g, kWell));
  CHECK(att.has_negative_eigenvalue);
  CHECK(att.lambda_min < -0.1);
  ExternalPotentialSpec barrier = kWell;
  barrier.amplitude = 1.0;
  CHECK_FALSE(bound_state_check(HamiltonianOp(g, barrier)).has_negative_eigenvalue);
  CHECK_FALSE(bound_state_check(HamiltonianOp(g)).has_negative_eigenvalue);
}

TEST_CASE("Hartree energy on plane waves and constants") {
  const Grid g(1, 64, 2 * pi * 4);
  const double L = g.box_length();
  WaveFunction wave(g);
  const double k = 3.0 / 4;  // 2 pi * 3 / L
  for (std::size_t i = 0; i < g.size(); ++i) wave[i] = std::polar(1.0, k * g.coordinate(i));
  CHECK(hartree_energy(HamiltonianOp(g), PairPotentialSpec{}, wave) ==
        doctest::Approx(0.5 * k * k * L).epsilon(1e-12));

  const double c = 0.3;
  WaveFunction flat(g);
  for (std::size_t i = 0; i < g.size(); ++i) flat[i] = c;
  const PairInteraction v(PairPotentialSpec{PairFamily::gaussian, 0.5, 1.0}, g);
  // W = c^2 * dV sum v, so the pair term is 1/2 c^4 L * l1(v).
  CHECK(hartree_energy(HamiltonianOp(g), v, flat) ==
        doctest::Approx(0.5 * c * c * c * c * L * v.l1_norm()).epsilon(1e-12));
}

TEST_CASE("Lanczos finds the extremes of a known diagonal operator") {
  const std::size_t n = 300;
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = -2.0 + 4.0 * static_cast<double>(i) / (n - 1);
  diag[17] = -3.0;
  diag[200] = 2.5;
  const HermitianApply op = [&](std::span<const std::complex<double>> x, std::span<std::complex<double>> y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = diag[i] * x[i];
  };
  LanczosOptions opts;
  opts.tolerance = 1e-10;
  const auto lo = lanczos_extreme(op, n, Extreme::smallest, opts);
  const auto hi = lanczos_extreme(op, n, Extreme::largest, opts);
  const auto mag = lanczos_extreme(op, n, Extreme::largest_magnitude, opts);
  CHECK(lo.value == doctest::Approx(-3.0).epsilon(1e-9));
  CHECK(hi.value == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(mag.value == doctest::Approx(-3.0).epsilon(1e-9));
  CHECK(lo.residual <= 1e-10);

  const auto u = random_unit_vector(n, 42);
  double norm = 0;
  for (auto z : u) norm += std::norm(z);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(random_unit_vector(n, 42) == u);
}
