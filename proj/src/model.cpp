#include "nss/model.hpp"

#include <cmath>
#include <numbers>

#include "nss/kernels.hpp"

namespace nss {

void ModelParams::validate() const {
  if (!(epsilon > 0.0)) throw NssError("invalid-params", "epsilon must be positive");
  if (!(length > 0.0)) throw NssError("invalid-params", "L must be positive");
  if (!(A >= 0.0)) throw NssError("invalid-params", "A must be non-negative");
}

VectorField2D beta(const VectorField2D& v) { return kernels::beta(v); }

Spectrum2D nonlinear_divergence_spectrum(const SpectralGrid& ops, const RealField2D& u,
                                         bool dealias) {
  return nonlinear_divergence_spectrum(ops, ops.forward(u), dealias);
}

Spectrum2D nonlinear_divergence_spectrum(const SpectralGrid& ops, const Spectrum2D& u_hat,
                                         bool dealias) {
  const auto b = kernels::beta(
      VectorField2D(ops.inverse(ops.derivative_x(u_hat)), ops.inverse(ops.derivative_y(u_hat))));
  auto s = ops.divergence_spectrum(ops.forward(b.x), ops.forward(b.y));
  if (dealias) ops.dealias(s);
  return s;
}

RealField2D nonlinear_divergence(const SpectralGrid& ops, const RealField2D& u) {
  return ops.inverse(nonlinear_divergence_spectrum(ops, u));
}

RealField2D extrapolated_nonlinear(const SpectralGrid& ops, const RealField2D& u_n,
                                   const RealField2D& u_nm1, const RealField2D& u_nm2) {
  require_same_grid(u_n.grid(), u_nm1.grid());
  require_same_grid(u_n.grid(), u_nm2.grid());
  const auto s0 = nonlinear_divergence_spectrum(ops, u_n);
  const auto s1 = nonlinear_divergence_spectrum(ops, u_nm1);
  const auto s2 = nonlinear_divergence_spectrum(ops, u_nm2);
  Spectrum2D s(ops.grid());
  for (std::size_t q = 0; q < s.size(); ++q) s[q] = 3.0 * s0[q] - 3.0 * s1[q] + s2[q];
  return ops.inverse(s);
}

EnergyBreakdown discrete_energy(const SpectralGrid& ops, const RealField2D& u,
                                const ModelParams& params) {
  const double h = u.grid().spacing();
  EnergyBreakdown e;
  e.nonlinear_part = h * h * kernels::log_density_sum(ops.gradient(u));
  const auto lap = ops.laplacian(u);
  e.diffusion_part = 0.5 * params.epsilon * params.epsilon * inner_product(lap, lap);
  e.total = e.nonlinear_part + e.diffusion_part;
  return e;
}

double modified_energy(const SpectralGrid& ops, const RealField2D& u_np1,
                       const RealField2D& u_n, const RealField2D& u_nm1, double dt,
                       const ModelParams& params) {
  if (!(dt > 0.0)) throw NssError("invalid-dt", "modified energy needs dt > 0");
  const auto d1 = kernels::difference(u_np1, u_n);
  const auto d0 = kernels::difference(u_n, u_nm1);
  return discrete_energy(ops, u_np1, params).total +
         3.0 / (4.0 * dt) * inner_product(d1, d1) + 1.0 / (6.0 * dt) * inner_product(d0, d0) +
         1.5 * sum_of_squares(ops.gradient(d1)) + 0.5 * sum_of_squares(ops.gradient(d0));
}

double min_stable_A(double epsilon) {
  if (!(epsilon > 0.0)) throw NssError("invalid-params", "epsilon must be positive");
  const double r = 49.0 / 16.0;
  return 9.0 / 32.0 * (r * r) * (r * r) / (epsilon * epsilon);
}

double energy_lower_bound(double epsilon, double length) {
  if (!(epsilon > 0.0) || !(length > 0.0)) {
    throw NssError("invalid-params", "energy bound needs epsilon, L > 0");
  }
  const double ratio = 4.0 * epsilon * epsilon * std::numbers::pi * std::numbers::pi /
                       (length * length);
  return 0.5 * length * length * (std::log(ratio) - ratio + 1.0);
}

namespace {

template <class Fn>
RealField2D sample(const GridSpec& grid, Fn&& fn) {
  RealField2D f(grid);
  const double h = grid.spacing();
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) f(i, j) = fn(i * h, j * h);
  }
  return f;
}

RealField2D profile_shape(const GridSpec& grid) {
  const double a = 2.0 * std::numbers::pi / grid.length;
  return sample(grid, [&](double x, double y) { return std::sin(a * x) * std::cos(a * y); });
}

}  // namespace

RealField2D exact_profile(double t, const GridSpec& grid) {
  return kernels::affine(profile_shape(grid), std::cos(t), 0.0);
}

RealField2D exact_profile_rate(double t, const GridSpec& grid) {
  return kernels::affine(profile_shape(grid), -std::sin(t), 0.0);
}

ManufacturedForcing::ManufacturedForcing(const SpectralGrid& ops, const ModelParams& params,
                                         ForcingMode mode)
    : params_(params), mode_(mode), shape_(profile_shape(ops.grid())) {
  const auto& grid = ops.grid();
  const double a = 2.0 * std::numbers::pi / grid.length;
  if (mode == ForcingMode::discrete) {
    biharmonic_ = ops.biharmonic(shape_);
    return;
  }
  biharmonic_ = kernels::affine(shape_, 4.0 * a * a * a * a, 0.0);
  lap_ = kernels::affine(shape_, -2.0 * a * a, 0.0);
  grad2_ = sample(grid, [&](double x, double y) {
    const double sx = a * std::cos(a * x) * std::cos(a * y);
    const double sy = -a * std::sin(a * x) * std::sin(a * y);
    return sx * sx + sy * sy;
  });
  hess_ = sample(grid, [&](double x, double y) {
    const double s = std::sin(a * x), c = std::cos(a * x);
    const double sy_ = std::sin(a * y), cy = std::cos(a * y);
    const double ux = a * c * cy, uy = -a * s * sy_;
    const double uxx = -a * a * s * cy, uyy = uxx, uxy = -a * a * c * sy_;
    return ux * ux * uxx + 2.0 * ux * uy * uxy + uy * uy * uyy;
  });
}

RealField2D ManufacturedForcing::operator()(const SpectralGrid& ops, double t) const {
  require_same_grid(ops.grid(), shape_.grid());
  const double c = std::cos(t);
  const double eps2 = params_.epsilon * params_.epsilon;
  auto f = kernels::affine(shape_, -std::sin(t), 0.0);
  kernels::axpy(eps2 * c, biharmonic_, f);
  if (mode_ == ForcingMode::discrete) {
    kernels::axpy(1.0, nonlinear_divergence(ops, kernels::affine(shape_, c, 0.0)), f);
    return f;
  }
  // div(grad U / (1 + |grad U|^2)) with U = c S, in closed form.
  for (std::size_t q = 0; q < f.size(); ++q) {
    const double denom = 1.0 + c * c * grad2_[q];
    f[q] += c * lap_[q] / denom - 2.0 * c * c * c * hess_[q] / (denom * denom);
  }
  return f;
}

RealField2D manufactured_forcing(const SpectralGrid& ops, double t, const ModelParams& params,
                                 ForcingMode mode) {
  return ManufacturedForcing(ops, params, mode)(ops, t);
}

}  // namespace nss
