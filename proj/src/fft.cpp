#include "hlc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "hlc/errors.hpp"
#include "hlc/kernels.hpp"

namespace hlc::fft {

namespace {

// fftw_plan_* is not thread safe; fftw_execute_dft on a cached plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

const PlanPair& plans_for(int dim, std::size_t n) {
  static std::map<std::pair<int, std::size_t>, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto key = std::make_pair(dim, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  int dims[3] = {static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)};
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= n;
  std::vector<cplx> scratch(total);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft(dim, dims, buf, buf, FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft(dim, dims, buf, buf, FFTW_BACKWARD, flags);
  if (p.forward == nullptr || p.backward == nullptr) throw Error("FFTW planning failed");
  return cache.emplace(key, p).first->second;
}

void check_size(const Grid& grid, std::span<cplx> data) {
  if (data.size() != grid.size()) throw DimensionMismatch("FFT buffer size does not match grid");
}

}  // namespace

void forward(const Grid& grid, std::span<cplx> data) {
  check_size(grid, data);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_for(grid.dim(), grid.n()).forward, buf, buf);
}

void inverse(const Grid& grid, std::span<cplx> data) {
  check_size(grid, data);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_for(grid.dim(), grid.n()).backward, buf, buf);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (cplx& z : data) z *= scale;
}

void apply_multiplier(const Grid& grid, std::span<cplx> data, std::span<const double> multiplier) {
  forward(grid, data);
  kernels::multiply(data, multiplier);
  inverse(grid, data);
}

void apply_multiplier(const Grid& grid, std::span<cplx> data, std::span<const cplx> multiplier) {
  forward(grid, data);
  kernels::multiply(data, multiplier);
  inverse(grid, data);
}

void dct2(std::span<const double> in, std::span<double> out) {
  if (in.size() != out.size()) throw DimensionMismatch("dct2 size mismatch");
  std::vector<double> a(in.begin(), in.end());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_r2r_1d(static_cast<int>(a.size()), a.data(), out.data(), FFTW_REDFT10,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace hlc::fft
