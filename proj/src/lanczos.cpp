#include "hlc/lanczos.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hlc/errors.hpp"
#include "hlc/kernels.hpp"

namespace hlc {

using cplx = std::complex<double>;

std::vector<cplx> random_unit_vector(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> v(dim);
  for (cplx& z : v) z = cplx(normal(rng), normal(rng));
  const double nrm = std::sqrt(kernels::norm_squared(v));
  for (cplx& z : v) z /= nrm;
  return v;
}

EigenEstimate lanczos_extreme(const HermitianApply& op, std::size_t dim, Extreme which,
                              const LanczosOptions& opts) {
  return lanczos_extreme(op, random_unit_vector(dim, opts.seed), which, opts);
}

EigenEstimate lanczos_extreme(const HermitianApply& op, std::vector<cplx> start, Extreme which,
                              const LanczosOptions& opts) {
  const std::size_t dim = start.size();
  if (dim == 0) throw InvalidParameter("lanczos: empty start vector");
  const int m_max = static_cast<int>(std::min<std::size_t>(std::max(opts.krylov_dim, 2), dim));

  {
    const double nrm = std::sqrt(kernels::norm_squared(start));
    if (!(nrm > 0.0)) throw InvalidParameter("lanczos: zero start vector");
    for (cplx& z : start) z /= nrm;
  }

  EigenEstimate best;
  best.residual = std::numeric_limits<double>::infinity();
  std::vector<std::vector<cplx>> basis;
  std::vector<cplx> w(dim);
  int applies = 0;

  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    basis.clear();
    basis.push_back(start);
    std::vector<double> alpha;
    std::vector<double> beta;
    for (int j = 0; j < m_max; ++j) {
      op(basis[j], w);
      ++applies;
      const double a = kernels::dot(basis[j], w).real();
      alpha.push_back(a);
      // Full reorthogonalization, twice.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) kernels::axpy(-kernels::dot(q, w), q, w);
      }
      const double b = std::sqrt(kernels::norm_squared(w));
      if (j + 1 == m_max || b <= 1e-14 * std::max(1.0, std::abs(a))) break;
      beta.push_back(b);
      std::vector<cplx> next(w);
      for (cplx& z : next) z /= b;
      basis.push_back(std::move(next));
    }

    const int m = static_cast<int>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub(std::max(m - 1, 0));
    for (int i = 0; i + 1 < m; ++i) sub[i] = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::VectorXd& theta = tri.eigenvalues();

    int pick = 0;
    switch (which) {
      case Extreme::smallest: pick = 0; break;
      case Extreme::largest: pick = m - 1; break;
      case Extreme::largest_magnitude:
        pick = std::abs(theta[0]) > std::abs(theta[m - 1]) ? 0 : m - 1;
        break;
    }

    std::vector<cplx> x(dim, cplx(0.0, 0.0));
    for (int i = 0; i < m; ++i) kernels::axpy(tri.eigenvectors()(i, pick), basis[i], x);
    const double xn = std::sqrt(kernels::norm_squared(x));
    for (cplx& z : x) z /= xn;

    // Certify with an explicit residual rather than the Lanczos estimate.
    op(x, w);
    ++applies;
    const double value = theta[pick];
    kernels::axpy(-value, x, w);
    const double residual = std::sqrt(kernels::norm_squared(w));

    const bool better = which == Extreme::smallest   ? value < best.value || best.vector.empty()
                        : which == Extreme::largest  ? value > best.value || best.vector.empty()
                                                     : std::abs(value) > std::abs(best.value) ||
                                                           best.vector.empty();
    if (better || residual < best.residual) {
      best.value = value;
      best.residual = residual;
      best.vector = x;
    }
    best.iterations = applies;
    if (residual <= opts.tolerance) {
      best.value = value;
      best.residual = residual;
      best.vector = std::move(x);
      return best;
    }
    start = std::move(x);
  }
  throw ConvergenceFailure("lanczos: residual " + std::to_string(best.residual) +
                               " above tolerance " + std::to_string(opts.tolerance),
                           best.value, best.residual, best.iterations);
}

}  // namespace hlc
