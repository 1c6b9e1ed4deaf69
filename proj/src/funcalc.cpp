#include "hlc/funcalc.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hlc/errors.hpp"
#include "hlc/fft.hpp"
#include "hlc/kernels.hpp"
#include "hlc/potentials.hpp"

namespace hlc {

namespace {

constexpr int kMaxWindowOrder = 8;

double vector_norm(std::span<const cplx> x) { return std::sqrt(kernels::norm_squared(x)); }

}  // namespace

// ---------------------------------------------------------------- window

SpectralWindow::SpectralWindow(double e1, double e2, double shoulder)
    : e1_(e1), e2_(e2), shoulder_(shoulder) {
  if (!std::isfinite(e1) || !std::isfinite(e2) || !(e1 < e2))
    throw InvalidParameter("spectral window needs finite E1 < E2");
  if (!(shoulder > 0.0) || 2.0 * shoulder > (e2 - e1) * (1.0 + 1e-12))
    throw InvalidParameter("window shoulder must lie in (0, (E2 - E1) / 2]");
}

SpectralWindow SpectralWindow::from_plateau(double lo, double hi, double shoulder) {
  if (!(lo <= hi)) throw InvalidParameter("window plateau needs lo <= hi");
  return SpectralWindow(lo - shoulder, hi + shoulder, shoulder);
}

SpectralWindow make_window(double e1, double e2, double plateau_fraction) {
  if (!(plateau_fraction > 0.0 && plateau_fraction < 1.0))
    throw InvalidParameter("plateau_fraction must lie in (0, 1)");
  if (!(e1 < e2)) throw InvalidParameter("spectral window needs E1 < E2");
  return SpectralWindow(e1, e2, 0.5 * (1.0 - plateau_fraction) * (e2 - e1));
}

double SpectralWindow::operator()(double x) const {
  if (x <= e1_ || x >= e2_) return 0.0;
  return smooth_step((x - e1_) / shoulder_) * smooth_step((e2_ - x) / shoulder_);
}

std::vector<double> SpectralWindow::derivatives(double x, int order) const {
  if (order < 0 || order > kMaxWindowOrder)
    throw InvalidParameter("window derivatives available up to order 8");
  const Jet<kMaxWindowOrder> j = jet<kMaxWindowOrder>(x);
  std::vector<double> out(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) out[k] = j.derivative(static_cast<std::size_t>(k));
  return out;
}

WindowSamples SpectralWindow::tabulate(std::size_t count) const {
  if (count < 2) throw InvalidParameter("tabulate needs at least two samples");
  WindowSamples s;
  s.x.resize(count);
  for (auto& d : s.derivative) d.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = e1_ + (e2_ - e1_) * static_cast<double>(i) / static_cast<double>(count - 1);
    const Jet<3> j = jet<3>(x);
    s.x[i] = x;
    for (std::size_t k = 0; k < 4; ++k) s.derivative[k][i] = j.derivative(k);
  }
  return s;
}

// ---------------------------------------------------------------- Chebyshev

namespace {

struct ChebMap {
  double center;
  double radius;
};

ChebMap cheb_map(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo <= hi))
    throw InvalidParameter("Chebyshev interval needs finite lo <= hi");
  const double half = std::max(0.5 * (hi - lo), 1e-12 * std::max(1.0, std::abs(hi)));
  // A hair of padding keeps rounding in the spectrum inside [-1, 1].
  return {0.5 * (lo + hi), half * (1.0 + 1e-12)};
}

/// First M Chebyshev coefficients of g by a length-M DCT-II of samples at
/// the Chebyshev points of the first kind.
std::vector<double> cheb_coefficients(const RealFunction& g, ChebMap map, std::size_t m) {
  std::vector<double> samples(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double theta = std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(m);
    samples[j] = g(map.center + map.radius * std::cos(theta));
  }
  std::vector<double> coef(m);
  fft::dct2(samples, coef);
  for (double& c : coef) c /= static_cast<double>(m);
  return coef;
}

std::size_t next_pow2(std::size_t x) {
  std::size_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

// Aliasing in the DCT coefficients is negligible once the upper half of the
// sampled spectrum is at roundoff level.
bool resolved(std::span<const double> coef, double floor) {
  double upper = 0.0;
  for (std::size_t k = coef.size() / 2; k < coef.size(); ++k) upper += std::abs(coef[k]);
  return upper <= floor;
}

}  // namespace

ChebyshevExpansion::ChebyshevExpansion(std::vector<double> all, double lo, double hi, int degree) {
  const ChebMap map = cheb_map(lo, hi);
  center_ = map.center;
  radius_ = map.radius;
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(degree) + 1, all.size());
  coef_.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep));
  tail_ = 0.0;
  for (std::size_t k = keep; k < all.size(); ++k) tail_ += std::abs(all[k]);
}

ChebyshevExpansion::ChebyshevExpansion(const RealFunction& g, double lo, double hi, int degree)
    : ChebyshevExpansion(
          [&] {
            if (degree < 8) throw InvalidParameter("Chebyshev degree must be >= 8");
            const ChebMap map = cheb_map(lo, hi);
            std::size_t m = next_pow2(std::max<std::size_t>(4 * (static_cast<std::size_t>(degree) + 1), 1024));
            std::vector<double> c = cheb_coefficients(g, map, m);
            while (!resolved(c, 1e-15 * static_cast<double>(m)) && m < (std::size_t{1} << 22)) {
              m *= 2;
              c = cheb_coefficients(g, map, m);
            }
            return c;
          }(),
          lo, hi, degree) {}

ChebyshevExpansion ChebyshevExpansion::to_tolerance(const RealFunction& g, double lo, double hi,
                                                    double tol, int max_degree) {
  if (!(tol > 0.0)) throw InvalidParameter("Chebyshev tolerance must be > 0");
  const ChebMap map = cheb_map(lo, hi);
  std::size_t m = 1024;
  for (;;) {
    std::vector<double> c = cheb_coefficients(g, map, m);
    const bool ok = resolved(c, std::max(0.01 * tol, 1e-16 * static_cast<double>(m)));
    if (ok || m >= (std::size_t{1} << 22)) {
      // Smallest degree N with sum_{k > N} |c_k| <= tol.
      double suffix = 0.0;
      std::size_t n = c.size() - 1;
      while (n > 0 && suffix + std::abs(c[n]) <= tol) {
        suffix += std::abs(c[n]);
        --n;
      }
      if (!ok || suffix > tol || static_cast<int>(n) > max_degree)
        throw ToleranceNotMet("Chebyshev expansion cannot reach tolerance " + std::to_string(tol),
                              suffix + std::abs(c[n]));
      return ChebyshevExpansion(std::move(c), lo, hi, std::max<int>(8, static_cast<int>(n)));
    }
    m *= 2;
  }
}

double ChebyshevExpansion::evaluate(double x) const {
  const double t = (x - center_) / radius_;
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = coef_.size() - 1; k >= 1; --k) {
    const double b0 = coef_[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return 0.5 * coef_[0] + t * b1 - b2;
}

void ChebyshevExpansion::apply(const HamiltonianOp& h, std::span<const cplx> in,
                               std::span<cplx> out) const {
  const std::size_t n = in.size();
  if (n != h.grid().size() || out.size() != n)
    throw DimensionMismatch("Chebyshev apply: buffer size does not match grid");
  std::vector<cplx> b1(n, 0.0);
  std::vector<cplx> b2(n, 0.0);
  std::vector<cplx> hb(n);
  const double two_over_r = 2.0 / radius_;
  const double two_c_over_r = 2.0 * center_ / radius_;
  // b_k = c_k psi + 2 A b_{k+1} - b_{k+2} with A = (H - c) / r.
  for (std::size_t k = coef_.size() - 1; k >= 1; --k) {
    h.apply(b1, hb);
    kernels::lincomb3(two_over_r, hb, -two_c_over_r, b1, -1.0, b2, b2);
    kernels::axpy(coef_[k], in, b2);
    std::swap(b1, b2);
  }
  h.apply(b1, hb);
  kernels::lincomb3(1.0 / radius_, hb, -center_ / radius_, b1, -1.0, b2, out);
  kernels::axpy(0.5 * coef_[0], in, out);
}

WindowApplication apply_window_cheb(const HamiltonianOp& h, const SpectralWindow& g,
                                    const WaveFunction& psi, int degree, double tolerance) {
  require_same_grid(h.grid(), psi.grid(), "apply_window_cheb");
  const ChebyshevExpansion p(g, h.lower_bound(), h.upper_bound(), degree);
  if (p.tail_bound() > tolerance)
    throw ToleranceNotMet("Chebyshev degree " + std::to_string(degree) + " misses tolerance " +
                              std::to_string(tolerance),
                          p.tail_bound());
  WaveFunction out(psi.grid());
  p.apply(h, psi.values(), out.values());
  return {std::move(out), p.tail_bound() * l2_norm(psi), p.degree()};
}

WindowApplication apply_window_cheb_auto(const HamiltonianOp& h, const SpectralWindow& g,
                                         const WaveFunction& psi, double tolerance) {
  require_same_grid(h.grid(), psi.grid(), "apply_window_cheb");
  const auto p = ChebyshevExpansion::to_tolerance(g, h.lower_bound(), h.upper_bound(), tolerance);
  WaveFunction out(psi.grid());
  p.apply(h, psi.values(), out.values());
  return {std::move(out), p.tail_bound() * l2_norm(psi), p.degree()};
}

// ---------------------------------------------------------------- resolvent

ResolventSolve solve_resolvent(const HamiltonianOp& h, cplx z, std::span<const cplx> b,
                               std::span<cplx> x, double tol, int max_iterations, int restart) {
  const Grid& grid = h.grid();
  const std::size_t n = grid.size();
  if (b.size() != n || x.size() != n) throw DimensionMismatch("solve_resolvent: buffer size");
  if (!(tol > 0.0) || restart < 1 || max_iterations < 1)
    throw InvalidParameter("solve_resolvent: tol, restart and max_iterations must be positive");

  std::fill(x.begin(), x.end(), cplx(0.0));
  const double bnorm = vector_norm(b);
  if (bnorm == 0.0) return {};

  double vbar = 0.0;
  for (double v : h.potential()) vbar += v;
  vbar /= static_cast<double>(n);
  std::vector<cplx> precond(n);
  const auto kin = h.kinetic();
  for (std::size_t i = 0; i < n; ++i) precond[i] = 1.0 / (z - kin[i] - vbar);

  std::vector<cplx> tmp(n);
  const auto apply_p = [&](std::span<const cplx> in, std::span<cplx> out) {
    std::copy(in.begin(), in.end(), out.begin());
    fft::apply_multiplier(grid, out, std::span<const cplx>(precond));
  };
  // out = (z - H) in
  const auto apply_a = [&](std::span<const cplx> in, std::span<cplx> out) {
    h.apply(in, out);
    kernels::lincomb3(z, in, -1.0, out, 0.0, out, out);
  };

  const int m = restart;
  // Krylov vectors are allocated on first use; most solves stop well short of `restart`.
  std::vector<std::vector<cplx>> basis(static_cast<std::size_t>(m) + 1);
  basis[0].resize(n);
  std::vector<cplx> hess(static_cast<std::size_t>((m + 1) * m));
  const auto H = [&](int i, int j) -> cplx& { return hess[static_cast<std::size_t>(i * m + j)]; };
  std::vector<double> cs(m);
  std::vector<cplx> sn(m);
  std::vector<cplx> rhs(static_cast<std::size_t>(m) + 1);
  std::vector<cplx> w(n);
  std::vector<cplx> r(b.begin(), b.end());
  double beta = bnorm;
  int total = 0;

  for (;;) {
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
    std::fill(rhs.begin(), rhs.end(), cplx(0.0));
    rhs[0] = beta;
    int j = 0;
    while (j < m && total < max_iterations) {
      ++total;
      apply_p(basis[j], tmp);
      apply_a(tmp, w);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = kernels::dot(basis[i], w);
        kernels::axpy(-H(i, j), basis[i], w);
      }
      const double hn = vector_norm(w);
      H(j + 1, j) = hn;
      if (hn > 0.0) {
        basis[j + 1].resize(n);
        for (std::size_t i = 0; i < n; ++i) basis[j + 1][i] = w[i] / hn;
      }
      for (int i = 0; i < j; ++i) {
        const cplx a = H(i, j);
        const cplx c = H(i + 1, j);
        H(i, j) = cs[i] * a + sn[i] * c;
        H(i + 1, j) = -std::conj(sn[i]) * a + cs[i] * c;
      }
      const cplx a = H(j, j);
      const cplx c = H(j + 1, j);
      const double t = std::hypot(std::abs(a), std::abs(c));
      if (std::abs(a) == 0.0) {
        cs[j] = 0.0;
        sn[j] = 1.0;
      } else {
        cs[j] = std::abs(a) / t;
        sn[j] = (a / std::abs(a)) * std::conj(c) / t;
      }
      H(j, j) = cs[j] * a + sn[j] * c;
      H(j + 1, j) = 0.0;
      rhs[j + 1] = -std::conj(sn[j]) * rhs[j];
      rhs[j] = cs[j] * rhs[j];
      ++j;
      if (std::abs(rhs[j]) <= 0.5 * tol * bnorm || hn == 0.0) break;
    }
    std::vector<cplx> y(static_cast<std::size_t>(j));
    for (int i = j - 1; i >= 0; --i) {
      cplx s = rhs[i];
      for (int k = i + 1; k < j; ++k) s -= H(i, k) * y[k];
      y[i] = s / H(i, i);
    }
    std::fill(w.begin(), w.end(), cplx(0.0));
    for (int i = 0; i < j; ++i) kernels::axpy(y[i], basis[i], w);
    apply_p(w, tmp);
    kernels::axpy(1.0, tmp, x);

    apply_a(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    beta = vector_norm(r);
    if (beta <= tol * bnorm) return {total, beta / bnorm};
    if (total >= max_iterations)
      throw ConvergenceFailure("resolvent GMRES did not converge at z = (" + std::to_string(z.real()) +
                                   ", " + std::to_string(z.imag()) + ")",
                               std::nan(""), beta / bnorm, total);
  }
}

// ---------------------------------------------------------------- Helffer-Sjostrand

namespace {

/// dbar g~ given g^{(0..order+1)}(x).
cplx dbar_from_derivatives(std::span<const double> d, int order, double eps, double y) {
  const double u = std::abs(y) / eps;
  if (u >= 1.0) return 0.0;
  const double tau = 1.0 - smooth_step(2.0 * u - 1.0);
  const double tau_prime = -2.0 * smooth_step_derivative(2.0 * u - 1.0);
  const cplx iy(0.0, y);
  cplx power = 1.0;
  cplx series = 0.0;
  double factorial = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) {
      power *= iy;
      factorial *= k;
    }
    series += d[k] * power / factorial;
  }
  // power = (iy)^n, factorial = n!
  const cplx top = d[order + 1] * power / factorial * tau;
  const double sign = y > 0.0 ? 1.0 : -1.0;
  return 0.5 * (top + cplx(0.0, 1.0) * series * tau_prime * sign / eps);
}

}  // namespace

cplx almost_analytic_dbar(const SpectralWindow& g, int order, double eps, double x, double y) {
  if (order < 2 || order > 4) throw InvalidParameter("almost-analytic order must be 2, 3 or 4");
  if (!(eps > 0.0)) throw InvalidParameter("almost-analytic cutoff height must be > 0");
  const auto d = g.derivatives(x, order + 1);
  return dbar_from_derivatives(d, order, eps, y);
}

HsApplication apply_window_hs(const HamiltonianOp& h, const SpectralWindow& g,
                              const WaveFunction& psi, const HsQuadrature& quad) {
  require_same_grid(h.grid(), psi.grid(), "apply_window_hs");
  if (quad.order < 2 || quad.order > 4)
    throw InvalidParameter("almost-analytic order must be 2, 3 or 4");
  if (quad.y_panels < 2 || quad.y_panels % 2 != 0)
    throw InvalidParameter("y_panels must be even and >= 2");
  const double eps = quad.y_max > 0.0 ? quad.y_max : g.shoulder();
  const double step_target = quad.x_step > 0.0 ? quad.x_step : std::min(0.005, g.shoulder() / 100.0);
  int nx = static_cast<int>(std::ceil((g.upper() - g.lower()) / step_target));
  nx += nx % 2;
  const double hx = (g.upper() - g.lower()) / nx;

  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G7 = boost::math::quadrature::gauss<double, 7>;
  const auto& k_abs = GK::abscissa();
  const auto& k_wts = GK::weights();
  const auto& g_wts = G7::weights();

  struct YNode {
    double y;
    double w_kronrod;
    double w_gauss;
  };
  std::vector<YNode> ynodes;
  const double panel = eps / quad.y_panels;
  for (int p = 0; p < quad.y_panels; ++p) {
    const double mid = (p + 0.5) * panel;
    const double half = 0.5 * panel;
    for (std::size_t j = 0; j < k_abs.size(); ++j) {
      // Kronrod abscissae with even index are the Gauss-7 nodes.
      const double wg = j % 2 == 0 ? g_wts[j / 2] * half : 0.0;
      ynodes.push_back({mid + half * k_abs[j], k_wts[j] * half, wg});
      if (j > 0) ynodes.push_back({mid - half * k_abs[j], k_wts[j] * half, wg});
    }
  }

  const std::size_t n = psi.size();
  std::vector<cplx> fine(n, 0.0);
  std::vector<cplx> coarse(n, 0.0);
  std::vector<cplx> u(n);
  const double psi_norm = l2_norm(psi);
  HsApplication out{WaveFunction(psi.grid())};
  double solver_sum = 0.0;

  for (int i = 1; i < nx; ++i) {
    const double x = g.lower() + i * hx;
    const auto d = g.derivatives(x, quad.order + 1);
    for (const YNode& node : ynodes) {
      for (const double y : {node.y, -node.y}) {
        const cplx dbar = dbar_from_derivatives(d, quad.order, eps, y);
        if (dbar == cplx(0.0)) continue;
        const ResolventSolve s = solve_resolvent(h, cplx(x, y), psi.values(), u, quad.solver_tol,
                                                 quad.max_iterations, quad.restart);
        ++out.solves;
        out.max_solver_iterations = std::max(out.max_solver_iterations, s.iterations);
        const cplx wf = hx * node.w_kronrod * dbar;
        kernels::axpy(wf, u, fine);
        if (i % 2 == 0 && node.w_gauss > 0.0) kernels::axpy(2.0 * hx * node.w_gauss * dbar, u, coarse);
        // ||(z - H)^{-1}|| <= 1 / |Im z|.
        solver_sum += std::abs(wf) * s.relative_residual * psi_norm / std::abs(y);
      }
    }
  }

  const double scale = -1.0 / std::numbers::pi;
  for (std::size_t k = 0; k < n; ++k) {
    out.value[k] = scale * fine[k];
    coarse[k] = scale * coarse[k] - out.value[k];
  }
  out.quadrature_error = std::sqrt(psi.grid().cell_volume() * kernels::norm_squared(coarse));
  out.solver_error = solver_sum / std::numbers::pi;
  return out;
}

// ---------------------------------------------------------------- speed bound

SpeedBoundResult speed_bound(const HamiltonianOp& h, const SpectralWindow& g, double tol,
                             SpeedBoundOptions opts) {
  if (!(tol > 0.0)) throw InvalidParameter("speed_bound: tol must be > 0");
  const Grid& grid = h.grid();
  const auto k2 = grid.wavenumber_squared();
  std::vector<double> k_abs(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) k_abs[i] = std::sqrt(k2[i]);
  const double k2_max = *std::max_element(k2.begin(), k2.end());
  // || |grad| g(H) ||^2 = lambda_max(|k| g(H)^2 |k|): one polynomial per apply
  // instead of two. ||p - g^2|| <= tail, so the operator error is tail * k2_max.
  const double cheb_tol = std::max(1e-14, std::min(1e-10, tol / (4.0 * (k2_max + 1.0))));
  const auto p = ChebyshevExpansion::to_tolerance([&g](double x) { return g(x) * g(x); },
                                                  h.lower_bound(), h.upper_bound(), cheb_tol);
  const double operator_error = p.tail_bound() * k2_max;

  std::vector<cplx> mid(grid.size());
  const HermitianApply op = [&](std::span<const cplx> x, std::span<cplx> y) {
    std::copy(x.begin(), x.end(), mid.begin());
    fft::apply_multiplier(grid, mid, std::span<const double>(k_abs));
    p.apply(h, mid, y);
    fft::apply_multiplier(grid, y, std::span<const double>(k_abs));
  };
  opts.lanczos.tolerance = tol;
  const EigenEstimate top = lanczos_extreme(op, grid.size(), Extreme::largest, opts.lanczos);
  const double theta = std::max(top.value, 0.0);
  const double delta = top.residual + operator_error;
  SpeedBoundResult r{std::sqrt(theta), g, top.iterations, 0.0};
  r.residual = std::sqrt(theta + delta) - std::sqrt(std::max(theta - delta, 0.0));
  return r;
}

double extrapolate_sharp_speed(std::span<const double> shoulders, std::span<const double> k_values) {
  if (shoulders.size() != k_values.size() || shoulders.size() < 2)
    throw InvalidParameter("extrapolation needs at least two (shoulder, k) pairs of equal length");
  const double n = static_cast<double>(shoulders.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < shoulders.size(); ++i) {
    sx += shoulders[i];
    sy += k_values[i];
    sxx += shoulders[i] * shoulders[i];
    sxy += shoulders[i] * k_values[i];
  }
  const double det = n * sxx - sx * sx;
  if (!(std::abs(det) > 0.0)) throw InvalidParameter("extrapolation needs distinct shoulders");
  return (sy * sxx - sx * sxy) / det;
}

// ---------------------------------------------------------------- commutator

CommutatorEstimate commutator_norm(const HamiltonianOp& h, const SpectralWindow& g,
                                   std::span<const double> w, const CommutatorOptions& opts) {
  const Grid& grid = h.grid();
  const std::size_t n = grid.size();
  if (w.size() != n) throw DimensionMismatch("commutator_norm: field size does not match grid");
  if (opts.probes < 16) throw InvalidParameter("commutator_norm needs at least 16 probes");
  const auto p = ChebyshevExpansion::to_tolerance(g, h.lower_bound(), h.upper_bound(), opts.cheb_tol);

  std::vector<cplx> wx(n);
  std::vector<cplx> gx(n);
  // y = i (g(H) W x - W g(H) x), a Hermitian operator.
  const HermitianApply op = [&](std::span<const cplx> x, std::span<cplx> y) {
    for (std::size_t i = 0; i < n; ++i) wx[i] = w[i] * x[i];
    p.apply(h, wx, y);
    p.apply(h, x, gx);
    for (std::size_t i = 0; i < n; ++i) y[i] = cplx(0.0, 1.0) * (y[i] - w[i] * gx[i]);
  };

  CommutatorEstimate est;
  std::vector<cplx> y(n);
  for (int j = 0; j < opts.probes; ++j) {
    const auto u = random_unit_vector(n, opts.seed + static_cast<std::uint64_t>(j));
    op(u, y);
    est.random_lower_bound = std::max(est.random_lower_bound, vector_norm(y));
  }
  for (int r = 0; r < opts.restarts; ++r) {
    LanczosOptions lo;
    lo.krylov_dim = opts.krylov_dim;
    lo.max_restarts = 1;
    lo.tolerance = 1e-6 * std::max(est.random_lower_bound, 1e-300);
    lo.seed = opts.seed + 1000 + static_cast<std::uint64_t>(r);
    double value = 0.0;
    try {
      value = lanczos_extreme(op, n, Extreme::largest_magnitude, lo).value;
    } catch (const ConvergenceFailure& e) {
      value = e.best_estimate();
    }
    if (std::isfinite(value)) est.power_estimate = std::max(est.power_estimate, std::abs(value));
  }
  est.norm = std::max(est.random_lower_bound, est.power_estimate);
  est.derivative_bound =
      wt_norms(EffectivePotentialField{grid, std::vector<double>(w.begin(), w.end()), 0.0}).max_second;
  return est;
}

}  // namespace hlc
