#include <doctest.h>

#include <cmath>

#include "hlc/smooth.hpp"

using namespace hlc;

namespace {

double h(double t) { return smooth_step(t); }

// Fourth-order centred differences.
double fd1(double (*f)(double), double x, double e) {
  return (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * e);
}
double fd2(double (*f)(double), double x, double e) {
  return (-f(x + 2 * e) + 16 * f(x + e) - 30 * f(x) + 16 * f(x - e) - f(x - 2 * e)) / (12 * e * e);
}

}  // namespace

TEST_CASE("jet arithmetic reproduces known Taylor coefficients") {
  using J = Jet<4>;
  const J x = J::variable(0.5);
  const J e = exp(x);
  for (std::size_t k = 0; k <= 4; ++k) CHECK(e.derivative(k) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));

  // 1 / (1 - x) at 0.5: k-th derivative is k! / 0.5^{k+1}.
  const J r = J::constant(1.0) / (J::constant(1.0) - x);
  double fact = 1.0;
  for (std::size_t k = 0; k <= 4; ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    CHECK(r.derivative(k) == doctest::Approx(fact / std::pow(0.5, k + 1)).epsilon(1e-13));
  }

  const J p = x * x * x;  // x^3
  CHECK(p.derivative(1) == doctest::Approx(0.75));
  CHECK(p.derivative(2) == doctest::Approx(3.0));
  CHECK(p.derivative(3) == doctest::Approx(6.0));
  CHECK(p.derivative(4) == doctest::Approx(0.0));
}

TEST_CASE("smooth step is a C-infinity transition from 0 to 1") {
  CHECK(h(-0.1) == 0.0);
  CHECK(h(0.0) == 0.0);
  CHECK(h(1.0) == 1.0);
  CHECK(h(2.0) == 1.0);
  CHECK(h(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  double prev = 0.0;
  for (int i = 1; i < 200; ++i) {
    const double t = i / 200.0;
    CHECK(h(t) + h(1 - t) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(h(t) >= prev);
    prev = h(t);
  }
  // Flat at the endpoints: every derivative vanishes.
  for (double t : {1e-3, 1 - 1e-3}) CHECK(smooth_step_derivative(t) < 1e-300 + 1e-200);
}

TEST_CASE("closed-form derivative and jets agree with finite differences") {
  for (double t : {0.1, 0.3, 0.5, 0.62, 0.9}) {
    CAPTURE(t);
    const double d1 = fd1(h, t, 1e-4);
    CHECK(smooth_step_derivative(t) == doctest::Approx(d1).epsilon(1e-8));
    const Jet<3> j = smooth_step(Jet<3>::variable(t));
    CHECK(j.derivative(0) == doctest::Approx(h(t)).epsilon(1e-15));
    CHECK(j.derivative(1) == doctest::Approx(d1).epsilon(1e-8));
    CHECK(j.derivative(2) == doctest::Approx(fd2(h, t, 1e-3)).epsilon(1e-6));
    CHECK(smooth_step_sqrt_derivative(t) == doctest::Approx(std::sqrt(smooth_step_derivative(t))).epsilon(1e-13));
  }
}
