#include "nss/grid.hpp"

#include <cmath>
#include <numbers>

namespace nss {

GridSpec::GridSpec(int points, double side) : n(points), length(side) {
  if (points < 4) {
    throw NssError("invalid-grid", "grid needs at least 4 points per side, got " +
                                       std::to_string(points));
  }
  if (!(side > 0.0) || !std::isfinite(side)) {
    throw NssError("invalid-grid", "domain length must be positive and finite");
  }
}

int GridSpec::signed_mode(int i) const noexcept {
  // Even N: storage index N/2 is the Nyquist mode, reported as -N/2.
  if (even()) return i < n / 2 ? i : i - n;
  return i <= n / 2 ? i : i - n;
}

double GridSpec::wavenumber(int i) const noexcept {
  return 2.0 * std::numbers::pi * signed_mode(i) / length;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) {
    throw NssError("grid-mismatch", "fields live on different grids (N=" +
                                        std::to_string(a.n) + " vs N=" +
                                        std::to_string(b.n) + ")");
  }
}

bool RealField2D::all_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Spectrum2D::value_type Spectrum2D::mode(int k, int l) const {
  const int n = grid_.n;
  auto wrap = [n](int m) { return ((m % n) + n) % n; };
  if (l < 0) return std::conj(mode(-k, -l));
  const int li = wrap(l);
  if (li >= grid_.half()) return std::conj(at(wrap(-k), wrap(-l)));
  return at(wrap(k), li);
}

VectorField2D::VectorField2D(RealField2D xs, RealField2D ys)
    : x(std::move(xs)), y(std::move(ys)) {
  require_same_grid(x.grid(), y.grid());
}

}  // namespace nss
