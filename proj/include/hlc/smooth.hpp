#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace hlc {

/// Truncated Taylor series a_0 + a_1 e + ... + a_N e^N in an infinitesimal
/// e. Evaluating a smooth function on Jet<N>{x, 1} yields its derivatives:
/// f^{(k)}(x) = k! * coef[k].
template <std::size_t N>
struct Jet {
  std::array<double, N + 1> c{};

  static Jet variable(double x) {
    Jet j;
    j.c[0] = x;
    if constexpr (N >= 1) j.c[1] = 1.0;
    return j;
  }
  static Jet constant(double x) {
    Jet j;
    j.c[0] = x;
    return j;
  }

  double derivative(std::size_t k) const {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return f * c[k];
  }

  friend Jet operator+(Jet a, const Jet& b) {
    for (std::size_t i = 0; i <= N; ++i) a.c[i] += b.c[i];
    return a;
  }
  friend Jet operator-(Jet a, const Jet& b) {
    for (std::size_t i = 0; i <= N; ++i) a.c[i] -= b.c[i];
    return a;
  }
  friend Jet operator-(Jet a) {
    for (double& x : a.c) x = -x;
    return a;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (std::size_t i = 0; i <= N; ++i)
      for (std::size_t j = 0; i + j <= N; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
  }
  friend Jet operator*(double s, Jet a) {
    for (double& x : a.c) x *= s;
    return a;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet q;
    for (std::size_t k = 0; k <= N; ++k) {
      double s = a.c[k];
      for (std::size_t j = 1; j <= k; ++j) s -= b.c[j] * q.c[k - j];
      q.c[k] = s / b.c[0];
    }
    return q;
  }
  friend Jet exp(const Jet& a) {
    Jet r;
    r.c[0] = std::exp(a.c[0]);
    for (std::size_t k = 1; k <= N; ++k) {
      double s = 0.0;
      for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a.c[j] * r.c[k - j];
      r.c[k] = s / static_cast<double>(k);
    }
    return r;
  }
};

/// exp(-1/t) for t > 0, else 0.
template <class T>
T flat_exp(const T& t) {
  if constexpr (std::is_same_v<T, double>) {
    return t > 0.0 ? std::exp(-1.0 / t) : 0.0;
  } else {
    if (t.c[0] <= 0.0) return T{};
    return exp(-(T::constant(1.0) / t));
  }
}

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, exp(-1/t)-type transition.
template <class T>
T smooth_step(const T& t) {
  double t0;
  if constexpr (std::is_same_v<T, double>) {
    t0 = t;
  } else {
    t0 = t.c[0];
  }
  if (t0 <= 0.0) return T{};
  if (t0 >= 1.0) {
    if constexpr (std::is_same_v<T, double>) {
      return 1.0;
    } else {
      return T::constant(1.0);
    }
  }
  T one;
  if constexpr (std::is_same_v<T, double>) {
    one = 1.0;
  } else {
    one = T::constant(1.0);
  }
  const T a = flat_exp(t);
  const T b = flat_exp(one - t);
  return a / (a + b);
}

/// d/dt smooth_step in closed form (test oracle and sqrt-derivative helper).
double smooth_step_derivative(double t);
/// sqrt(d/dt smooth_step), smooth by construction.
double smooth_step_sqrt_derivative(double t);

}  // namespace hlc
