#include "hlc/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hlc/errors.hpp"
#include "hlc/fft.hpp"
#include "hlc/kernels.hpp"

namespace hlc {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(int dim, std::size_t n, double box_length) : dim_(dim), n_(n), box_length_(box_length) {
  if (dim < 1 || dim > 3) throw InvalidParameter("grid dimension must be 1, 2 or 3");
  if (n < 8 || !is_power_of_two(n))
    throw InvalidParameter("grid points per axis must be a power of two >= 8, got " +
                           std::to_string(n));
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw InvalidParameter("box length must be positive");
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= n;
}

double Grid::cell_volume() const { return std::pow(spacing(), dim_); }

double Grid::coordinate(std::size_t j) const {
  return -0.5 * box_length_ + static_cast<double>(j) * spacing();
}

double Grid::wavenumber(std::size_t m) const {
  const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
  auto mm = static_cast<std::ptrdiff_t>(m);
  if (mm >= half) mm -= static_cast<std::ptrdiff_t>(n_);
  return 2.0 * std::numbers::pi * static_cast<double>(mm) / box_length_;
}

double Grid::max_wavenumber() const {
  return std::numbers::pi * static_cast<double>(n_) / box_length_;
}

std::size_t Grid::axis_index(std::size_t flat, int axis) const {
  std::size_t stride = 1;
  for (int a = dim_ - 1; a > axis; --a) stride *= n_;
  return (flat / stride) % n_;
}

std::vector<double> Grid::radius_squared() const {
  std::vector<double> r2(size_, 0.0);
  for (int a = 0; a < dim_; ++a) {
    for (std::size_t i = 0; i < size_; ++i) {
      const double x = coordinate(axis_index(i, a));
      r2[i] += x * x;
    }
  }
  return r2;
}

std::vector<double> Grid::wavenumber_squared() const {
  std::vector<double> k2(size_, 0.0);
  for (int a = 0; a < dim_; ++a) {
    for (std::size_t i = 0; i < size_; ++i) {
      const double k = wavenumber(axis_index(i, a));
      k2[i] += k * k;
    }
  }
  return k2;
}

std::vector<double> Grid::axis_wavenumbers(int axis) const {
  std::vector<double> k(size_);
  for (std::size_t i = 0; i < size_; ++i) k[i] = wavenumber(axis_index(i, axis));
  return k;
}

std::vector<double> Grid::axis_coordinates(int axis) const {
  std::vector<double> x(size_);
  for (std::size_t i = 0; i < size_; ++i) x[i] = coordinate(axis_index(i, axis));
  return x;
}

void require_same_grid(const Grid& a, const Grid& b, const char* context) {
  if (!(a == b)) throw DimensionMismatch(std::string(context) + ": fields live on different grids");
}

WaveFunction::WaveFunction(Grid grid) : grid_(grid), values_(grid.size(), cplx(0.0, 0.0)) {}

WaveFunction::WaveFunction(Grid grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw DimensionMismatch("wave function has " + std::to_string(values_.size()) +
                            " values, grid expects " + std::to_string(grid_.size()));
  check_finite();
}

void WaveFunction::check_finite() const {
  for (const cplx& z : values_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw InvalidParameter("wave function contains a non-finite entry");
  }
}

WaveFunction& WaveFunction::operator+=(const WaveFunction& other) {
  require_same_grid(grid_, other.grid_, "WaveFunction +=");
  kernels::axpy(1.0, other.values_, values_);
  return *this;
}

WaveFunction& WaveFunction::operator-=(const WaveFunction& other) {
  require_same_grid(grid_, other.grid_, "WaveFunction -=");
  kernels::axpy(-1.0, other.values_, values_);
  return *this;
}

WaveFunction& WaveFunction::operator*=(cplx scale) {
  for (cplx& z : values_) z *= scale;
  return *this;
}

WaveFunction operator+(WaveFunction a, const WaveFunction& b) { return a += b; }
WaveFunction operator-(WaveFunction a, const WaveFunction& b) { return a -= b; }
WaveFunction operator*(cplx s, WaveFunction a) { return a *= s; }

cplx inner(const WaveFunction& a, const WaveFunction& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  return a.grid().cell_volume() * kernels::dot(a.values(), b.values());
}

double l2_norm(const WaveFunction& psi) {
  return std::sqrt(psi.grid().cell_volume() * kernels::norm_squared(psi.values()));
}

double l2_norm_fourier(const WaveFunction& psi) {
  std::vector<cplx> hat(psi.values().begin(), psi.values().end());
  fft::forward(psi.grid(), hat);
  const double n = static_cast<double>(psi.size());
  return std::sqrt(psi.grid().cell_volume() * kernels::norm_squared(hat) / n);
}

double sobolev_norm(const WaveFunction& psi, double s) {
  if (!(s >= 0.0)) throw InvalidParameter("Sobolev index must be >= 0");
  if (s == 0.0) return l2_norm(psi);
  std::vector<cplx> hat(psi.values().begin(), psi.values().end());
  fft::forward(psi.grid(), hat);
  std::vector<double> weight = psi.grid().wavenumber_squared();
  // <k>^{2s}
  for (double& w : weight) w = std::pow(1.0 + w, s);
  const double n = static_cast<double>(psi.size());
  return std::sqrt(psi.grid().cell_volume() * kernels::weighted_norm_squared(hat, weight) / n);
}

double weighted_norm(const WaveFunction& psi, double gamma) {
  if (!(gamma >= 0.0)) throw InvalidParameter("weight exponent must be >= 0");
  if (gamma == 0.0) return l2_norm(psi);
  std::vector<double> weight = psi.grid().radius_squared();
  for (double& w : weight) w = std::pow(1.0 + w, gamma);
  return std::sqrt(psi.grid().cell_volume() * kernels::weighted_norm_squared(psi.values(), weight));
}

double lp_norm(const WaveFunction& psi, double p) {
  if (!(p >= 1.0)) throw InvalidParameter("Lebesgue exponent must be >= 1");
  if (std::isinf(p)) return kernels::max_abs(psi.values());
  if (p == 2.0) return l2_norm(psi);
  return std::pow(psi.grid().cell_volume() * kernels::power_sum(psi.values(), p), 1.0 / p);
}

}  // namespace hlc
