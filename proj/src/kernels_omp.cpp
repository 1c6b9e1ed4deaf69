#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "hlc/kernels.hpp"

namespace hlc::kernels {

namespace omp {

namespace parallel {

#define HLC_PRAGMA(x) _Pragma(#x)
#define HLC_FOR HLC_PRAGMA(omp parallel for schedule(static))
#define HLC_FOR_SUM(a) HLC_PRAGMA(omp parallel for schedule(static) reduction(+ : a))
#define HLC_FOR_SUM2(a, b) HLC_PRAGMA(omp parallel for schedule(static) reduction(+ : a, b))
#define HLC_FOR_MAX(a) HLC_PRAGMA(omp parallel for schedule(static) reduction(max : a))

#include "kernels_body.inc"

}  // namespace parallel

// Below this size even an `if(false)` parallel region costs more than the
// loop, so small inputs go straight to the serial bodies.
constexpr std::size_t kParallelThreshold = 4096;

#define HLC_DISPATCH(n, call) \
  return (n) > kParallelThreshold ? parallel::call : serial::call

double norm_squared(std::span<const cplx> x) { HLC_DISPATCH(x.size(), norm_squared(x)); }
double power_sum(std::span<const cplx> x, double p) { HLC_DISPATCH(x.size(), power_sum(x, p)); }
double max_abs(std::span<const cplx> x) { HLC_DISPATCH(x.size(), max_abs(x)); }
double max_abs(std::span<const double> x) { HLC_DISPATCH(x.size(), max_abs(x)); }
double weighted_norm_squared(std::span<const cplx> x, std::span<const double> w) {
  HLC_DISPATCH(x.size(), weighted_norm_squared(x, w));
}
cplx dot(std::span<const cplx> a, std::span<const cplx> b) { HLC_DISPATCH(a.size(), dot(a, b)); }
void multiply(std::span<cplx> x, std::span<const double> m) { HLC_DISPATCH(x.size(), multiply(x, m)); }
void multiply(std::span<cplx> x, std::span<const cplx> m) { HLC_DISPATCH(x.size(), multiply(x, m)); }
void apply_phase(std::span<cplx> x, std::span<const double> a, std::span<const double> b, double tau) {
  HLC_DISPATCH(x.size(), apply_phase(x, a, b, tau));
}
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  HLC_DISPATCH(x.size(), axpy(alpha, x, y));
}
void lincomb3(cplx alpha, std::span<const cplx> a, cplx beta, std::span<const cplx> b, cplx gamma,
              std::span<const cplx> c, std::span<cplx> out) {
  HLC_DISPATCH(out.size(), lincomb3(alpha, a, beta, b, gamma, c, out));
}
void modulus_squared(std::span<const cplx> x, std::span<double> out) {
  HLC_DISPATCH(x.size(), modulus_squared(x, out));
}
void modulus_power(std::span<const cplx> x, double kappa, double sigma, std::span<double> out) {
  HLC_DISPATCH(x.size(), modulus_power(x, kappa, sigma, out));
}

}  // namespace omp

int thread_count() { return omp_get_max_threads(); }

}  // namespace hlc::kernels
