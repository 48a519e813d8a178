#include "nss/kernels.hpp"

#include <cmath>
#include <vector>

namespace nss::kernels {

VectorField2D beta(const VectorField2D& v) {
  require_same_grid(v.x.grid(), v.y.grid());
  VectorField2D out(v.grid());
  const auto count = static_cast<std::ptrdiff_t>(v.x.size());
  const double* vx = v.x.data();
  const double* vy = v.y.data();
  double* bx = out.x.data();
  double* by = out.y.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < count; ++q) {
    const double inv = 1.0 / (1.0 + vx[q] * vx[q] + vy[q] * vy[q]);
    bx[q] = vx[q] * inv;
    by[q] = vy[q] * inv;
  }
  return out;
}

double log_density_sum(const VectorField2D& v) {
  require_same_grid(v.x.grid(), v.y.grid());
  const int n = v.x.n();
  const double* vx = v.x.data();
  const double* vy = v.y.data();
  std::vector<double> partial(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * n + j;
      s += -0.5 * std::log1p(vx[q] * vx[q] + vy[q] * vy[q]);
    }
    partial[i] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

RealField2D difference(const RealField2D& a, const RealField2D& b) {
  require_same_grid(a.grid(), b.grid());
  RealField2D out(a.grid());
  const auto count = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < count; ++q) out[q] = a[q] - b[q];
  return out;
}

void axpy(double alpha, const RealField2D& x, RealField2D& y) {
  require_same_grid(x.grid(), y.grid());
  const auto count = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < count; ++q) y[q] += alpha * x[q];
}

RealField2D affine(const RealField2D& u, double factor, double offset) {
  RealField2D out(u.grid());
  const auto count = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < count; ++q) out[q] = u[q] * factor + offset;
  return out;
}

}  // namespace nss::kernels
