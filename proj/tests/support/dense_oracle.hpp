#pragma once

// Dense-matrix reference for small grids: H is assembled column by column
// from the matrix-free operator and diagonalized with Eigen.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

#include "hlc/fft.hpp"
#include "hlc/operators.hpp"

namespace hlc::testing {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline Matrix assemble(std::size_t n, const std::function<void(std::span<const cplx>, std::span<cplx>)>& op) {
  Matrix m(n, n);
  std::vector<cplx> e(n, 0.0);
  std::vector<cplx> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    op(e, col);
    for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
    e[j] = 0.0;
  }
  return m;
}

inline Matrix dense_hamiltonian(const HamiltonianOp& h) {
  Matrix m = assemble(h.grid().size(), [&h](std::span<const cplx> x, std::span<cplx> y) { h.apply(x, y); });
  return 0.5 * (m + m.adjoint());
}

/// Fourier multiplier m(k) as a dense matrix.
inline Matrix dense_multiplier(const Grid& grid, const std::vector<double>& symbol) {
  return assemble(grid.size(), [&](std::span<const cplx> x, std::span<cplx> y) {
    std::copy(x.begin(), x.end(), y.begin());
    fft::apply_multiplier(grid, y, std::span<const double>(symbol));
  });
}

/// H built from explicit DFT sums, independent of the FFT library:
/// (K psi)_j = (1/n) sum_m 1/2 k_m^2 e^{i k_m (x_j - x_l)} psi_l. One dimension.
inline Matrix explicit_hamiltonian_1d(const Grid& grid, std::span<const double> potential) {
  const std::size_t n = grid.n();
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t mm = 0; mm < n; ++mm) {
    const double k = grid.wavenumber(mm);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l)
        m(j, l) += 0.5 * k * k / static_cast<double>(n) *
                   std::polar(1.0, k * (grid.coordinate(j) - grid.coordinate(l)));
  }
  for (std::size_t j = 0; j < n; ++j) m(j, j) += potential[j];
  return m;
}

class DenseSpectrum {
 public:
  explicit DenseSpectrum(const HamiltonianOp& h) : solver_(dense_hamiltonian(h)) {}

  const Eigen::VectorXd& eigenvalues() const { return solver_.eigenvalues(); }

  /// f(H) as a dense matrix.
  Matrix function(const std::function<double(double)>& f) const {
    const auto& u = solver_.eigenvectors();
    Eigen::VectorXd d(u.cols());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = f(solver_.eigenvalues()(i));
    return u * d.asDiagonal() * u.adjoint();
  }

 private:
  Eigen::SelfAdjointEigenSolver<Matrix> solver_;
};

inline Vector to_eigen(const WaveFunction& psi) {
  Vector v(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) v(i) = psi[i];
  return v;
}

inline WaveFunction from_eigen(const Grid& grid, const Vector& v) {
  std::vector<cplx> values(v.data(), v.data() + v.size());
  return WaveFunction(grid, std::move(values));
}

/// Spectral norm of a Hermitian matrix.
inline double hermitian_norm(const Matrix& a) {
  const Eigen::SelfAdjointEigenSolver<Matrix> s(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
  return std::max(std::abs(s.eigenvalues()(0)), std::abs(s.eigenvalues()(s.eigenvalues().size() - 1)));
}

}  // namespace hlc::testing
