#include "nss/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace nss {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer real_buffer(int n) {
  return RealBuffer(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
}
ComplexBuffer complex_buffer(int n) {
  return ComplexBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

constexpr double kHermitianTolerance = 1e-12;

// i * a * z without the generic complex product (and its NaN recovery path).
inline std::complex<double> times_i(double a, std::complex<double> z) {
  return {-a * z.imag(), a * z.real()};
}

}  // namespace

class SpectralGrid::Plans {
 public:
  explicit Plans(int n) : n_(n), m_(n / 2 + 1) {
    auto r = real_buffer(n);
    auto c = complex_buffer(n);
    auto c2 = complex_buffer(n);
    std::lock_guard lock(planner_mutex());
    row_r2c_ = fftw_plan_dft_r2c_1d(n, r.get(), c.get(), FFTW_ESTIMATE);
    row_c2r_ = fftw_plan_dft_c2r_1d(n, c.get(), r.get(), FFTW_ESTIMATE);
    col_fwd_ = fftw_plan_dft_1d(n, c.get(), c2.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    col_bwd_ = fftw_plan_dft_1d(n, c.get(), c2.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(row_r2c_);
    fftw_destroy_plan(row_c2r_);
    fftw_destroy_plan(col_fwd_);
    fftw_destroy_plan(col_bwd_);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;

  void forward(const double* in, std::complex<double>* out) const {
    const int n = n_, m = m_;
    const double scale = 1.0 / (static_cast<double>(n) * n);
#pragma omp parallel
    {
      auto r = real_buffer(n);
      auto c = complex_buffer(n);
#pragma omp for schedule(static)
      for (int i = 0; i < n; ++i) {
        std::copy_n(in + static_cast<std::size_t>(i) * n, n, r.get());
        fftw_execute_dft_r2c(row_r2c_, r.get(), c.get());
        auto* row = out + static_cast<std::size_t>(i) * m;
        for (int l = 0; l < m; ++l) row[l] = {c[l][0], c[l][1]};
      }
      auto ci = complex_buffer(n);
#pragma omp for schedule(static)
      for (int l = 0; l < m; ++l) {
        for (int k = 0; k < n; ++k) {
          const auto v = out[static_cast<std::size_t>(k) * m + l];
          ci[k][0] = v.real();
          ci[k][1] = v.imag();
        }
        fftw_execute_dft(col_fwd_, ci.get(), c.get());
        for (int k = 0; k < n; ++k) {
          out[static_cast<std::size_t>(k) * m + l] = {c[k][0] * scale, c[k][1] * scale};
        }
      }
    }
  }

  void inverse(const std::complex<double>* in, double* out) const {
    const int n = n_, m = m_;
    std::vector<std::complex<double>> work(static_cast<std::size_t>(n) * m);
#pragma omp parallel
    {
      auto ci = complex_buffer(n);
      auto co = complex_buffer(n);
#pragma omp for schedule(static)
      for (int l = 0; l < m; ++l) {
        for (int k = 0; k < n; ++k) {
          const auto v = in[static_cast<std::size_t>(k) * m + l];
          ci[k][0] = v.real();
          ci[k][1] = v.imag();
        }
        fftw_execute_dft(col_bwd_, ci.get(), co.get());
        for (int k = 0; k < n; ++k) {
          work[static_cast<std::size_t>(k) * m + l] = {co[k][0], co[k][1]};
        }
      }
      auto r = real_buffer(n);
#pragma omp for schedule(static)
      for (int i = 0; i < n; ++i) {
        const auto* row = work.data() + static_cast<std::size_t>(i) * m;
        for (int l = 0; l < m; ++l) {
          ci[l][0] = row[l].real();
          ci[l][1] = row[l].imag();
        }
        fftw_execute_dft_c2r(row_c2r_, ci.get(), r.get());
        std::copy_n(r.get(), n, out + static_cast<std::size_t>(i) * n);
      }
    }
  }

 private:
  int n_, m_;
  fftw_plan row_r2c_{}, row_c2r_{}, col_fwd_{}, col_bwd_{};
};

SpectralGrid::SpectralGrid(const GridSpec& grid)
    : grid_(grid), plans_(std::make_shared<const Plans>(grid.n)) {
  const int n = grid.n, m = grid.half();
  kx_.resize(n);
  ky_.resize(m);
  for (int k = 0; k < n; ++k) kx_[k] = grid.is_nyquist(k) ? 0.0 : grid.wavenumber(k);
  for (int l = 0; l < m; ++l) ky_[l] = grid.is_nyquist(l) ? 0.0 : grid.wavenumber(l);
  lambda_.resize(grid.spectral_size());
  for (int k = 0; k < n; ++k) {
    const double a = grid.wavenumber(k);
    for (int l = 0; l < m; ++l) {
      const double b = grid.wavenumber(l);
      lambda_[static_cast<std::size_t>(k) * m + l] = a * a + b * b;
    }
  }
  lambda_max_ = *std::max_element(lambda_.begin(), lambda_.end());
}

SpectralGrid::~SpectralGrid() = default;
SpectralGrid::SpectralGrid(const SpectralGrid&) = default;
SpectralGrid& SpectralGrid::operator=(const SpectralGrid&) = default;
SpectralGrid::SpectralGrid(SpectralGrid&&) noexcept = default;
SpectralGrid& SpectralGrid::operator=(SpectralGrid&&) noexcept = default;

Spectrum2D SpectralGrid::forward(const RealField2D& field) const {
  check(field.grid());
  Spectrum2D s(grid_);
  plans_->forward(field.data(), s.data());
  return s;
}

RealField2D SpectralGrid::inverse(const Spectrum2D& spectrum) const {
  check(spectrum.grid());
  // The c2r transform drops the imaginary residue; make sure there is none to drop.
  const double defect = hermitian_defect(spectrum);
  if (defect > kHermitianTolerance) {
    throw NssError("not-hermitian",
                   "inverse transform of a spectrum that is not conjugate-symmetric "
                   "(relative defect " + std::to_string(defect) + ")");
  }
  RealField2D f(grid_);
  plans_->inverse(spectrum.data(), f.data());
  return f;
}

Spectrum2D SpectralGrid::derivative_x(const Spectrum2D& s) const {
  check(s.grid());
  const int n = grid_.n, m = grid_.half();
  Spectrum2D out(grid_);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < m; ++l) {
      out.at(k, l) = times_i(kx_[k], s.at(k, l));
    }
  }
  return out;
}

Spectrum2D SpectralGrid::derivative_y(const Spectrum2D& s) const {
  check(s.grid());
  const int n = grid_.n, m = grid_.half();
  Spectrum2D out(grid_);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < m; ++l) {
      out.at(k, l) = times_i(ky_[l], s.at(k, l));
    }
  }
  return out;
}

Spectrum2D SpectralGrid::divergence_spectrum(const Spectrum2D& vx, const Spectrum2D& vy) const {
  check(vx.grid());
  check(vy.grid());
  const int n = grid_.n, m = grid_.half();
  Spectrum2D out(grid_);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < m; ++l) {
      out.at(k, l) = times_i(kx_[k], vx.at(k, l)) + times_i(ky_[l], vy.at(k, l));
    }
  }
  return out;
}

void SpectralGrid::dealias(Spectrum2D& s) const {
  check(s.grid());
  const int n = grid_.n, m = grid_.half();
  const int cutoff = n / 3;
  for (int k = 0; k < n; ++k) {
    const bool kill_row = std::abs(grid_.signed_mode(k)) > cutoff;
    for (int l = 0; l < m; ++l) {
      if (kill_row || l > cutoff) s.at(k, l) = 0.0;
    }
  }
}

VectorField2D SpectralGrid::gradient(const RealField2D& f) const {
  const auto s = forward(f);
  return VectorField2D(inverse(derivative_x(s)), inverse(derivative_y(s)));
}

RealField2D SpectralGrid::divergence(const VectorField2D& v) const {
  require_same_grid(v.x.grid(), v.y.grid());
  return inverse(divergence_spectrum(forward(v.x), forward(v.y)));
}

RealField2D SpectralGrid::laplacian(const RealField2D& f) const {
  auto s = forward(f);
  for (std::size_t q = 0; q < s.size(); ++q) s[q] *= -lambda_[q];
  return inverse(s);
}

RealField2D SpectralGrid::biharmonic(const RealField2D& f) const {
  auto s = forward(f);
  for (std::size_t q = 0; q < s.size(); ++q) s[q] *= lambda_[q] * lambda_[q];
  return inverse(s);
}

RealField2D SpectralGrid::inverse_neg_laplacian(const RealField2D& f) const {
  check(f.grid());
  const double avg = mean(f);
  // mean() is area-normalised; compare against the RMS level of f.
  const double scale = norm_l2(f) / f.grid().length;
  if (std::abs(avg) > 1e-10 * scale) {
    throw NssError("nonzero-mean", "(-Laplacian)^-1 requires a zero-mean field, mean = " +
                                       std::to_string(avg));
  }
  auto s = forward(f);
  s[0] = 0.0;
  for (std::size_t q = 1; q < s.size(); ++q) s[q] /= lambda_[q];
  return inverse(s);
}

double SpectralGrid::norm_hminus1(const RealField2D& f) const {
  return std::sqrt(std::max(0.0, inner_product(f, inverse_neg_laplacian(f))));
}

double SpectralGrid::norm(const RealField2D& f, NormKind kind, double p) const {
  check(f.grid());
  switch (kind) {
    case NormKind::l2:
      return norm_l2(f);
    case NormKind::lp:
      return norm_lp(f, p);
    case NormKind::inf:
      return norm_inf(f);
    case NormKind::hminus1:
      return norm_hminus1(f);
  }
  return 0.0;
}

namespace {

template <class RowFn>
double row_reduce(int n, RowFn&& row_sum) {
  std::vector<double> partial(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) partial[i] = row_sum(i);
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace

double inner_product(const RealField2D& f, const RealField2D& g) {
  require_same_grid(f.grid(), g.grid());
  const int n = f.n();
  const double h = f.grid().spacing();
  const double* a = f.data();
  const double* b = g.data();
  return h * h * row_reduce(n, [&](int i) {
           double s = 0.0;
           for (int j = 0; j < n; ++j) {
             const std::size_t q = static_cast<std::size_t>(i) * n + j;
             s += a[q] * b[q];
           }
           return s;
         });
}

double norm_l2(const RealField2D& f) { return std::sqrt(inner_product(f, f)); }

double norm_lp(const RealField2D& f, double p) {
  if (!(p >= 1.0)) throw NssError("invalid-norm", "l^p norm requires p >= 1");
  const int n = f.n();
  const double h = f.grid().spacing();
  const double* a = f.data();
  const double sum = row_reduce(n, [&](int i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::pow(std::abs(a[static_cast<std::size_t>(i) * n + j]), p);
    return s;
  });
  return std::pow(h * h * sum, 1.0 / p);
}

double norm_inf(const RealField2D& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double mean(const RealField2D& f) {
  const int n = f.n();
  const double* a = f.data();
  const double sum = row_reduce(n, [&](int i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += a[static_cast<std::size_t>(i) * n + j];
    return s;
  });
  // h^2 * sum / L^2 == sum / N^2
  return sum / (static_cast<double>(n) * n);
}

double sum_of_squares(const VectorField2D& v) {
  return inner_product(v.x, v.x) + inner_product(v.y, v.y);
}

double hermitian_defect(const Spectrum2D& s) {
  const auto& g = s.grid();
  const int n = g.n;
  // Squared magnitudes: std::abs goes through hypot and dominates the inverse transform.
  double biggest = 0.0;
  for (const auto& c : s.coefficients()) biggest = std::max(biggest, std::norm(c));
  if (biggest == 0.0) return 0.0;
  double defect = 0.0;
  std::vector<int> columns{0};
  if (g.even()) columns.push_back(n / 2);
  for (int l : columns) {
    for (int k = 0; k < n; ++k) {
      const int partner = (n - k) % n;
      defect = std::max(defect, std::norm(s.at(k, l) - std::conj(s.at(partner, l))));
    }
  }
  return std::sqrt(defect / biggest);
}

void enforce_hermitian(Spectrum2D& s) {
  const auto& g = s.grid();
  const int n = g.n;
  std::vector<int> columns{0};
  if (g.even()) columns.push_back(n / 2);
  for (int l : columns) {
    for (int k = 0; k <= n / 2; ++k) {
      const int partner = (n - k) % n;
      const auto avg = 0.5 * (s.at(k, l) + std::conj(s.at(partner, l)));
      s.at(k, l) = avg;
      s.at(partner, l) = std::conj(avg);
    }
  }
}

}  // namespace nss
