#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hlc {

using cplx = std::complex<double>;

/// Periodic box [-L/2, L/2)^d with n points per axis.
///
/// Points are stored row-major, axis 0 slowest. Coordinates are
/// x_j = -L/2 + j L/n; wavenumbers follow the FFT ordering
/// k_m = 2 pi m / L for m < n/2 and 2 pi (m - n) / L otherwise, so the
/// Nyquist mode sits on the negative side.
class Grid {
 public:
  Grid(int dim, std::size_t n, double box_length);

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }
  double box_length() const { return box_length_; }
  double spacing() const { return box_length_ / static_cast<double>(n_); }
  double cell_volume() const;
  std::size_t size() const { return size_; }

  /// Coordinate of lattice index j along any axis.
  double coordinate(std::size_t j) const;
  /// Wavenumber of FFT index m along any axis.
  double wavenumber(std::size_t m) const;
  /// Largest |k| component along one axis (pi n / L).
  double max_wavenumber() const;

  /// Lattice index along `axis` of flat point index `flat`.
  std::size_t axis_index(std::size_t flat, int axis) const;

  /// |x|^2 at every point.
  std::vector<double> radius_squared() const;
  /// |k|^2 at every FFT index.
  std::vector<double> wavenumber_squared() const;
  /// k_axis at every FFT index.
  std::vector<double> axis_wavenumbers(int axis) const;
  /// x_axis at every point.
  std::vector<double> axis_coordinates(int axis) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.box_length_ == b.box_length_;
  }

 private:
  int dim_;
  std::size_t n_;
  double box_length_;
  std::size_t size_;
};

/// Throws DimensionMismatch when the grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* context);

/// Complex field on a Grid. Entries are always finite.
class WaveFunction {
 public:
  explicit WaveFunction(Grid grid);
  WaveFunction(Grid grid, std::vector<cplx> values);

  const Grid& grid() const { return grid_; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  std::size_t size() const { return values_.size(); }

  cplx operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  WaveFunction& operator+=(const WaveFunction& other);
  WaveFunction& operator-=(const WaveFunction& other);
  WaveFunction& operator*=(cplx scale);

  /// Throws InvalidParameter if any entry is NaN or infinite.
  void check_finite() const;

 private:
  Grid grid_;
  std::vector<cplx> values_;
};

WaveFunction operator+(WaveFunction a, const WaveFunction& b);
WaveFunction operator-(WaveFunction a, const WaveFunction& b);
WaveFunction operator*(cplx s, WaveFunction a);

/// <x> = sqrt(1 + |x|^2); used for weights, fits and time brackets alike.
inline double japanese(double r_squared) { return std::sqrt(1.0 + r_squared); }

/// Discrete L2 inner product with the cell-volume factor, antilinear in `a`.
cplx inner(const WaveFunction& a, const WaveFunction& b);

double l2_norm(const WaveFunction& psi);
/// Discrete H^s norm with Fourier multiplier <k>^s. Requires s >= 0.
double sobolev_norm(const WaveFunction& psi, double s);
/// Norm of <x>^gamma psi. Requires gamma >= 0.
double weighted_norm(const WaveFunction& psi, double gamma);
/// (dV sum |psi|^p)^{1/p}; p = infinity gives the max modulus. Requires p >= 1.
double lp_norm(const WaveFunction& psi, double p);
/// l2 norm evaluated on the Fourier side (Parseval cross-check).
double l2_norm_fourier(const WaveFunction& psi);

}  // namespace hlc
