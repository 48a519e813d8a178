#pragma once

#include <memory>
#include <vector>

#include "nss/grid.hpp"

namespace nss {

enum class NormKind { l2, lp, inf, hminus1 };

/// Fourier collocation operators on a periodic square grid.
///
/// Transforms are computed as independent 1-D FFTs over rows and then columns,
/// distributed across OpenMP threads. Every 1-D transform uses the same plan,
/// so results are bitwise identical for a given N regardless of thread count.
///
/// For even N the Nyquist mode is dropped by first-derivative operators and
/// kept (with eigenvalue -kappa^2) by the Laplacian and biharmonic.
class SpectralGrid {
 public:
  explicit SpectralGrid(const GridSpec& grid);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&);
  SpectralGrid& operator=(const SpectralGrid&);
  SpectralGrid(SpectralGrid&&) noexcept;
  SpectralGrid& operator=(SpectralGrid&&) noexcept;

  const GridSpec& grid() const noexcept { return grid_; }

  Spectrum2D forward(const RealField2D& field) const;
  RealField2D inverse(const Spectrum2D& spectrum) const;

  RealField2D zero_field() const { return RealField2D(grid_); }

  // Physical-space operators.
  VectorField2D gradient(const RealField2D& f) const;
  RealField2D divergence(const VectorField2D& v) const;
  RealField2D laplacian(const RealField2D& f) const;
  RealField2D biharmonic(const RealField2D& f) const;
  /// Requires a zero-mean input; result has zero mean.
  RealField2D inverse_neg_laplacian(const RealField2D& f) const;

  // Spectral-space building blocks used by the time stepper.
  Spectrum2D derivative_x(const Spectrum2D& s) const;
  Spectrum2D derivative_y(const Spectrum2D& s) const;
  Spectrum2D divergence_spectrum(const Spectrum2D& vx, const Spectrum2D& vy) const;
  /// Zeroes modes with |k| > N/3 or |l| > N/3 in place.
  void dealias(Spectrum2D& s) const;

  /// lambda_{k,l} = kappa_k^2 + kappa_l^2 in half-spectrum layout.
  const std::vector<double>& eigenvalues() const noexcept { return lambda_; }
  double max_eigenvalue() const noexcept { return lambda_max_; }

  double norm(const RealField2D& f, NormKind kind, double p = 2.0) const;
  double norm_hminus1(const RealField2D& f) const;

 private:
  class Plans;

  void check(const GridSpec& other) const { require_same_grid(grid_, other); }

  GridSpec grid_;
  std::shared_ptr<const Plans> plans_;
  std::vector<double> kx_;  // i*kappa for d/dx, Nyquist zeroed
  std::vector<double> ky_;
  std::vector<double> lambda_;
  double lambda_max_ = 0.0;
};

// Grid-function reductions. Sums are accumulated per row and then across rows
// in a fixed order, so they do not depend on the thread count.

/// h^2 * sum f g
double inner_product(const RealField2D& f, const RealField2D& g);
double norm_l2(const RealField2D& f);
double norm_lp(const RealField2D& f, double p);
double norm_inf(const RealField2D& f);
/// h^2 * sum f / L^2, the area-normalised average.
double mean(const RealField2D& f);
double sum_of_squares(const VectorField2D& v);

/// Largest |fhat_{k,l} - conj(fhat_{-k,-l})| over the self-conjugate columns,
/// relative to the largest coefficient magnitude.
double hermitian_defect(const Spectrum2D& s);
/// Replaces each self-paired column entry and its partner by their conjugate-symmetric average.
void enforce_hermitian(Spectrum2D& s);

}  // namespace nss
