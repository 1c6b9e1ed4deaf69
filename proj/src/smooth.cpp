#include "hlc/smooth.hpp"

namespace hlc {

double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  const double s = a + b;
  return a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (s * s);
}

double smooth_step_sqrt_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  const double root_ab = std::exp(-0.5 / t - 0.5 / (1.0 - t));
  return root_ab * std::sqrt(1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (a + b);
}

}  // namespace hlc
