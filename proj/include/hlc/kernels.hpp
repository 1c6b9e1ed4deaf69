#pragma once

// Pointwise grid kernels. Every kernel exists twice: `serial` is the
// reference implementation kept for testing, `omp` is the OpenMP version the
// library calls. Both namespaces expose identical signatures.

#include <complex>
#include <span>

namespace hlc::kernels {

using cplx = std::complex<double>;

#define HLC_KERNEL_DECLS                                                                         \
  /* sum |x_j|^2 */                                                                              \
  double norm_squared(std::span<const cplx> x);                                                  \
  /* sum |x_j|^p */                                                                              \
  double power_sum(std::span<const cplx> x, double p);                                           \
  /* max |x_j| */                                                                                \
  double max_abs(std::span<const cplx> x);                                                       \
  /* max |x_j| over a real field */                                                              \
  double max_abs(std::span<const double> x);                                                     \
  /* sum w_j |x_j|^2 */                                                                          \
  double weighted_norm_squared(std::span<const cplx> x, std::span<const double> w);              \
  /* sum conj(a_j) b_j */                                                                        \
  cplx dot(std::span<const cplx> a, std::span<const cplx> b);                                    \
  /* x_j *= m_j */                                                                               \
  void multiply(std::span<cplx> x, std::span<const double> m);                                   \
  /* x_j *= m_j */                                                                               \
  void multiply(std::span<cplx> x, std::span<const cplx> m);                                     \
  /* x_j *= exp(-i tau (a_j + b_j)); b may be empty */                                           \
  void apply_phase(std::span<cplx> x, std::span<const double> a, std::span<const double> b,      \
                   double tau);                                                                  \
  /* y_j += alpha x_j */                                                                         \
  void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);                             \
  /* out_j = alpha a_j + beta b_j + gamma c_j */                                                 \
  void lincomb3(cplx alpha, std::span<const cplx> a, cplx beta, std::span<const cplx> b,         \
                cplx gamma, std::span<const cplx> c, std::span<cplx> out);                       \
  /* out_j = |x_j|^2 */                                                                          \
  void modulus_squared(std::span<const cplx> x, std::span<double> out);                          \
  /* out_j = kappa |x_j|^(2 sigma) */                                                            \
  void modulus_power(std::span<const cplx> x, double kappa, double sigma, std::span<double> out);

namespace serial {
HLC_KERNEL_DECLS
}  // namespace serial

namespace omp {
HLC_KERNEL_DECLS
}  // namespace omp

#undef HLC_KERNEL_DECLS

using namespace omp;

/// Number of OpenMP threads the `omp` kernels will use.
int thread_count();

}  // namespace hlc::kernels
