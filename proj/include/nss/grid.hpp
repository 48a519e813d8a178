#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nss {

/// Error carrying a short machine-readable code (e.g. "grid-mismatch").
class NssError : public std::runtime_error {
 public:
  NssError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Square periodic collocation grid on (0, L)^2 with N points per side.
struct GridSpec {
  int n = 0;
  double length = 1.0;

  GridSpec() = default;
  GridSpec(int points, double side);

  double spacing() const noexcept { return length / n; }
  bool even() const noexcept { return n % 2 == 0; }
  /// Number of stored y-frequencies in the half spectrum (r2c layout).
  int half() const noexcept { return n / 2 + 1; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n) * n; }
  std::size_t spectral_size() const noexcept {
    return static_cast<std::size_t>(n) * half();
  }
  /// Signed mode number for storage index i in [0, n).
  int signed_mode(int i) const noexcept;
  /// True for the unpaired k = -N/2 mode of an even grid.
  bool is_nyquist(int i) const noexcept { return even() && i == n / 2; }
  /// 2*pi*k/L for storage index i.
  double wavenumber(int i) const noexcept;

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.n == b.n && a.length == b.length;
  }
};

void require_same_grid(const GridSpec& a, const GridSpec& b);

/// N x N samples, row-major, value(i, j) = f(x_i, y_j), x_i = i*h.
class RealField2D {
 public:
  RealField2D() = default;
  explicit RealField2D(const GridSpec& grid, double fill = 0.0)
      : grid_(grid), values_(grid.size(), fill) {}

  const GridSpec& grid() const noexcept { return grid_; }
  int n() const noexcept { return grid_.n; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(int i, int j) { return values_[index(i, j)]; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  bool all_finite() const noexcept;

  friend bool operator==(const RealField2D& a, const RealField2D& b) {
    return a.grid_ == b.grid_ && a.values_ == b.values_;
  }

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * grid_.n + j;
  }
  GridSpec grid_;
  std::vector<double> values_;
};

/// Fourier coefficients of a real field in half-spectrum layout:
/// row = x-frequency storage index k in [0, N), column = y-frequency l in [0, N/2].
/// Normalised so that f_{i,j} = sum_{k,l} fhat_{k,l} exp(i(kappa_k x_i + kappa_l y_j)).
class Spectrum2D {
 public:
  using value_type = std::complex<double>;

  Spectrum2D() = default;
  explicit Spectrum2D(const GridSpec& grid)
      : grid_(grid), coeffs_(grid.spectral_size()) {}

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  value_type& at(int k, int l) { return coeffs_[static_cast<std::size_t>(k) * grid_.half() + l]; }
  value_type at(int k, int l) const {
    return coeffs_[static_cast<std::size_t>(k) * grid_.half() + l];
  }
  value_type& operator[](std::size_t m) { return coeffs_[m]; }
  value_type operator[](std::size_t m) const { return coeffs_[m]; }

  /// Coefficient for signed modes (k, l); negative l is recovered by conjugate symmetry.
  value_type mode(int k, int l) const;

  std::span<value_type> coefficients() noexcept { return coeffs_; }
  std::span<const value_type> coefficients() const noexcept { return coeffs_; }
  value_type* data() noexcept { return coeffs_.data(); }
  const value_type* data() const noexcept { return coeffs_.data(); }

 private:
  GridSpec grid_;
  std::vector<value_type> coeffs_;
};

struct VectorField2D {
  RealField2D x;
  RealField2D y;

  VectorField2D() = default;
  explicit VectorField2D(const GridSpec& grid) : x(grid), y(grid) {}
  VectorField2D(RealField2D xs, RealField2D ys);

  const GridSpec& grid() const noexcept { return x.grid(); }
};

}  // namespace nss
