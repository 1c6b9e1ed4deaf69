#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hlc/errors.hpp"
#include "hlc/funcalc.hpp"
#include "hlc/operators.hpp"
#include "support/dense_oracle.hpp"

using namespace hlc;
using namespace hlc::testing;

namespace {

const ExternalPotentialSpec kWell{ExternalFamily::gaussian_well, -1.0, 0.0, 1.0};

WaveFunction random_field(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  WaveFunction psi(g);
  for (std::size_t i = 0; i < g.size(); ++i) psi[i] = {n(rng), n(rng)};
  return psi;
}

double largest_singular_value(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
}

}  // namespace

TEST_CASE("window support, plateau and symmetry") {
  const SpectralWindow g = SpectralWindow::from_plateau(0.5, 1.5, 0.25);
  CHECK(g.lower() == 0.25);
  CHECK(g.upper() == 1.75);
  CHECK(g.plateau_fraction() == doctest::Approx(2.0 / 3));
  CHECK(g(0.25) == 0.0);
  CHECK(g(1.75) == 0.0);
  CHECK(g(-1.0) == 0.0);
  for (double x : {0.5, 0.8, 1.2, 1.5}) CHECK(g(x) == 1.0);
  for (double u : {0.05, 0.1, 0.2}) CHECK(g(0.25 + u) == doctest::Approx(g(1.75 - u)).epsilon(1e-14));
  CHECK(make_window(0.0, 2.0, 0.5).shoulder() == doctest::Approx(0.5));
  CHECK_THROWS_AS(SpectralWindow(1.0, 0.0, 0.1), InvalidParameter);
}

TEST_CASE("window derivatives agree with finite differences") {
  const SpectralWindow g(0.0, 2.0, 0.4);
  const double e = 1e-4;
  for (double x : {0.1, 0.25, 1.7, 1.85}) {
    CAPTURE(x);
    const auto d = g.derivatives(x, 3);
    CHECK(d[0] == doctest::Approx(g(x)).epsilon(1e-15));
    const double fd1 = (g(x + e) - g(x - e)) / (2 * e);
    const double fd2 = (g(x + e) - 2 * g(x) + g(x - e)) / (e * e);
    CHECK(d[1] == doctest::Approx(fd1).epsilon(1e-6));
    CHECK(d[2] == doctest::Approx(fd2).epsilon(1e-5));
    const double fd3 = (g.derivatives(x + e, 2)[2] - g.derivatives(x - e, 2)[2]) / (2 * e);
    CHECK(d[3] == doctest::Approx(fd3).epsilon(1e-5));
  }
  const WindowSamples t = g.tabulate(11);
  CHECK(t.x.front() == 0.0);
  CHECK(t.x.back() == 2.0);
  CHECK(t.derivative[1][3] == doctest::Approx(g.derivatives(t.x[3], 1)[1]));
}

TEST_CASE("Chebyshev expansion: coefficient tail bounds the uniform error") {
  const SpectralWindow g(0.3, 1.3, 0.2);
  const RealFunction f = [&](double x) { return g(x); };
  for (double tol : {1e-4, 1e-8, 1e-12}) {
    const auto c = ChebyshevExpansion::to_tolerance(f, -1.0, 4.0, tol);
    CHECK(c.tail_bound() <= tol);
    double worst = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double x = -1.0 + 5.0 * i / 4000;
      worst = std::max(worst, std::abs(c.evaluate(x) - f(x)));
    }
    CHECK(worst <= c.tail_bound() + 1e-14);
  }
  // Polynomials are reproduced exactly.
  const ChebyshevExpansion cubic([](double x) { return x * x * x - 2 * x; }, -2.0, 3.0, 8);
  CHECK(cubic.evaluate(1.7) == doctest::Approx(1.7 * 1.7 * 1.7 - 3.4).epsilon(1e-13));
}

TEST_CASE("g(H) by Chebyshev and by Helffer-Sjostrand match the dense spectral calculus") {
  const Grid grid(1, 64, 16.0);
  const HamiltonianOp h(grid, kWell);
  const DenseSpectrum dense(h);
  const SpectralWindow g = SpectralWindow::from_plateau(0.4, 1.2, 0.3);
  const Matrix G = dense.function([&](double x) { return g(x); });
  for (unsigned seed : {1u, 2u}) {
    const WaveFunction psi = random_field(grid, seed);
    const WaveFunction exact = from_eigen(grid, G * to_eigen(psi));

    const auto cheb = apply_window_cheb_auto(h, g, psi, 1e-11);
    CHECK(l2_norm(cheb.value - exact) <= cheb.error_bound + 1e-12 * l2_norm(psi));
    CHECK(cheb.error_bound <= 1e-11 * l2_norm(psi) * 1.0000001);

    const auto hs = apply_window_hs(h, g, psi);
    const double hs_err = l2_norm(hs.value - exact);
    CHECK(hs_err <= 10 * (hs.quadrature_error + hs.solver_error) + 1e-12 * l2_norm(psi));
    CHECK(hs_err < 1e-5 * l2_norm(psi));
  }
  CHECK_THROWS_AS(apply_window_cheb(h, g, random_field(grid, 3), 10, 1e-12), ToleranceNotMet);
}

TEST_CASE("almost-analytic dbar below the cutoff is g^(n+1)(x) (iy)^n / (2 n!)") {
  const SpectralWindow g(0.0, 2.0, 0.5);
  for (int n : {2, 3, 4}) {
    const double x = 0.3, y = 0.1;
    const auto d = g.derivatives(x, n + 1);
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    const cplx expected = 0.5 * d[n + 1] * std::pow(cplx(0, y), n) / fact;
    CHECK(std::abs(almost_analytic_dbar(g, n, 0.5, x, y) - expected) < 1e-12 * (1 + std::abs(expected)));
    CHECK(almost_analytic_dbar(g, n, 0.5, x, 0.0) == cplx(0.0));
  }
}

TEST_CASE("resolvent solve leaves a small residual") {
  const Grid grid(1, 64, 16.0);
  const HamiltonianOp h(grid, kWell);
  const Matrix H = dense_hamiltonian(h);
  const WaveFunction b = random_field(grid, 9);
  WaveFunction x(grid);
  const cplx z(0.7, 0.05);
  const auto r = solve_resolvent(h, z, b.values(), x.values(), 1e-11);
  const Vector res = (z * Matrix::Identity(64, 64) - H) * to_eigen(x) - to_eigen(b);
  CHECK(res.norm() <= 1e-10 * to_eigen(b).norm());
  CHECK(r.relative_residual <= 1e-11);
}

TEST_CASE("speed bound equals the dense norm of |k| g(H)") {
  const Grid grid(1, 64, 16.0);
  const HamiltonianOp h(grid, kWell);
  const DenseSpectrum dense(h);
  const SpectralWindow g = SpectralWindow::from_plateau(0.4, 1.2, 0.3);
  std::vector<double> abs_k(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) abs_k[m] = std::abs(grid.wavenumber(m));
  const double exact = largest_singular_value(dense_multiplier(grid, abs_k) * dense.function([&](double x) { return g(x); }));
  const SpeedBoundResult r = speed_bound(h, g, 1e-9);
  CHECK(r.k_I == doctest::Approx(exact).epsilon(1e-7));
  CHECK(std::abs(r.k_I - exact) <= r.residual + 1e-9);

  // Free case: k_I is the largest lattice |k| inside the support of g(k^2/2).
  const HamiltonianOp free(grid);
  double kmax = 0.0;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const double k = std::abs(grid.wavenumber(m));
    kmax = std::max(kmax, k * g(0.5 * k * k));
  }
  CHECK(speed_bound(free, g, 1e-10).k_I == doctest::Approx(kmax).epsilon(1e-9));
}

TEST_CASE("linear extrapolation of k_I to zero shoulder") {
  const std::vector<double> s{0.3, 0.2, 0.1};
  const std::vector<double> k{2.0 + 0.3 * 0.5, 2.0 + 0.2 * 0.5, 2.0 + 0.1 * 0.5};
  CHECK(extrapolate_sharp_speed(s, k) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("commutator norm estimate against the dense commutator") {
  const Grid grid(1, 64, 16.0);
  const HamiltonianOp h(grid, kWell);
  const DenseSpectrum dense(h);
  const SpectralWindow g = SpectralWindow::from_plateau(0.4, 1.2, 0.3);
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) w[i] = std::exp(-std::pow(grid.coordinate(i) - 1.0, 2));
  const Matrix G = dense.function([&](double x) { return g(x); });
  Matrix W = Matrix::Zero(64, 64);
  for (int i = 0; i < 64; ++i) W(i, i) = w[i];
  const double exact = largest_singular_value(G * W - W * G);
  const CommutatorEstimate est = commutator_norm(h, g, w);
  CHECK(est.random_lower_bound <= exact * (1 + 1e-6));
  CHECK(est.norm == doctest::Approx(exact).epsilon(1e-4));
  CHECK(est.derivative_bound > 0.0);

  const std::vector<double> constant(grid.size(), 2.0);
  CHECK(commutator_norm(h, g, constant).norm < 1e-8);
}
