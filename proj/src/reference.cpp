#include "nss/reference.hpp"

#include <cmath>
#include <numbers>

namespace nss::reference {
namespace {

using cplx = std::complex<double>;

// Twiddles e^{sign 2 pi i k j / n}.
std::vector<cplx> twiddles(int n, double sign) {
  std::vector<cplx> w(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / n;
      w[static_cast<std::size_t>(k) * n + j] = {std::cos(angle), std::sin(angle)};
    }
  }
  return w;
}

double kappa(const GridSpec& g, int i, bool first_derivative) {
  if (first_derivative && g.is_nyquist(i)) return 0.0;
  return g.wavenumber(i);
}

template <class Symbol>
RealField2D multiply(const RealField2D& f, Symbol&& symbol) {
  auto s = forward(f);
  const auto& g = f.grid();
  for (int k = 0; k < g.n; ++k) {
    for (int l = 0; l < g.half(); ++l) s.at(k, l) *= symbol(k, l);
  }
  return inverse(s);
}

}  // namespace

Spectrum2D forward(const RealField2D& f) {
  const auto& g = f.grid();
  const int n = g.n, m = g.half();
  const auto w = twiddles(n, -1.0);
  // Along y, keeping l in [0, N/2].
  std::vector<cplx> rows(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < m; ++l) {
      cplx acc = 0.0;
      for (int j = 0; j < n; ++j) acc += f(i, j) * w[static_cast<std::size_t>(l) * n + j];
      rows[static_cast<std::size_t>(i) * m + l] = acc;
    }
  }
  Spectrum2D s(g);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < m; ++l) {
      cplx acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += rows[static_cast<std::size_t>(i) * m + l] * w[static_cast<std::size_t>(k) * n + i];
      }
      s.at(k, l) = acc * scale;
    }
  }
  return s;
}

RealField2D inverse(const Spectrum2D& s) {
  const auto& g = s.grid();
  const int n = g.n, m = g.half();
  const auto w = twiddles(n, +1.0);
  std::vector<cplx> cols(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < m; ++l) {
      cplx acc = 0.0;
      for (int k = 0; k < n; ++k) acc += s.at(k, l) * w[static_cast<std::size_t>(i) * n + k];
      cols[static_cast<std::size_t>(i) * m + l] = acc;
    }
  }
  // Rebuild the full y-spectrum from conjugate symmetry and sum its real part.
  RealField2D f(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int l = 0; l < n; ++l) {
        cplx c;
        if (l < m) {
          c = cols[static_cast<std::size_t>(i) * m + l];
        } else {
          c = std::conj(cols[static_cast<std::size_t>(i) * m + (n - l)]);
        }
        acc += (c * w[static_cast<std::size_t>(j) * n + l]).real();
      }
      f(i, j) = acc;
    }
  }
  return f;
}

VectorField2D gradient(const RealField2D& f) {
  const auto& g = f.grid();
  auto dx = multiply(f, [&](int k, int) { return cplx(0.0, kappa(g, k, true)); });
  auto dy = multiply(f, [&](int, int l) { return cplx(0.0, kappa(g, l, true)); });
  return VectorField2D(std::move(dx), std::move(dy));
}

RealField2D divergence(const VectorField2D& v) {
  const auto& g = v.grid();
  auto sx = forward(v.x);
  const auto sy = forward(v.y);
  for (int k = 0; k < g.n; ++k) {
    for (int l = 0; l < g.half(); ++l) {
      sx.at(k, l) = cplx(0.0, kappa(g, k, true)) * sx.at(k, l) +
                    cplx(0.0, kappa(g, l, true)) * sy.at(k, l);
    }
  }
  return inverse(sx);
}

RealField2D laplacian(const RealField2D& f) {
  const auto& g = f.grid();
  return multiply(f, [&](int k, int l) {
    const double a = kappa(g, k, false), b = kappa(g, l, false);
    return cplx(-(a * a + b * b), 0.0);
  });
}

RealField2D biharmonic(const RealField2D& f) {
  const auto& g = f.grid();
  return multiply(f, [&](int k, int l) {
    const double a = kappa(g, k, false), b = kappa(g, l, false);
    const double lam = a * a + b * b;
    return cplx(lam * lam, 0.0);
  });
}

VectorField2D beta(const VectorField2D& v) {
  VectorField2D out(v.grid());
  for (std::size_t q = 0; q < v.x.size(); ++q) {
    const double denom = 1.0 + v.x[q] * v.x[q] + v.y[q] * v.y[q];
    out.x[q] = v.x[q] / denom;
    out.y[q] = v.y[q] / denom;
  }
  return out;
}

RealField2D nonlinear_divergence(const RealField2D& u) {
  return reference::divergence(reference::beta(reference::gradient(u)));
}

double discrete_energy(const RealField2D& u, const ModelParams& params) {
  const double h = u.grid().spacing();
  const auto grad = gradient(u);
  const auto lap = laplacian(u);
  double log_sum = 0.0, lap_sum = 0.0;
  for (std::size_t q = 0; q < u.size(); ++q) {
    log_sum += -0.5 * std::log(1.0 + grad.x[q] * grad.x[q] + grad.y[q] * grad.y[q]);
    lap_sum += lap[q] * lap[q];
  }
  return h * h * log_sum + 0.5 * params.epsilon * params.epsilon * h * h * lap_sum;
}

HistoryWindow step(const HistoryWindow& window, const SchemeConfig& config, double dt) {
  const auto& g = window.grid();
  const auto& p = config.params;
  const double t_next = window.time + dt;

  // Explicit part in physical space: 3u^n - 3/2 u^{n-1} + 1/3 u^{n-2} - dt S^n (+ dt f).
  const auto s0 = nonlinear_divergence(window.u_n);
  const auto s1 = nonlinear_divergence(window.u_nm1);
  const auto s2 = nonlinear_divergence(window.u_nm2);
  RealField2D explicit_part(g);
  for (std::size_t q = 0; q < explicit_part.size(); ++q) {
    explicit_part[q] = 3.0 * window.u_n[q] - 1.5 * window.u_nm1[q] + window.u_nm2[q] / 3.0 -
                       dt * (3.0 * s0[q] - 3.0 * s1[q] + s2[q]);
  }
  if (config.forcing) {
    const SpectralGrid ops(g);
    const auto f = config.forcing(ops, t_next);
    for (std::size_t q = 0; q < f.size(); ++q) explicit_part[q] += dt * f[q];
  }
  // A dt^3 Lap^2 u^n on the right, (11/6 + (eps^2 dt + A dt^3) Lap^2) on the left.
  const auto regular = biharmonic(window.u_n);
  for (std::size_t q = 0; q < explicit_part.size(); ++q) {
    explicit_part[q] += p.A * dt * dt * dt * regular[q];
  }
  auto s = forward(explicit_part);
  const double coeff = p.epsilon * p.epsilon * dt + p.A * dt * dt * dt;
  for (int k = 0; k < g.n; ++k) {
    for (int l = 0; l < g.half(); ++l) {
      const double a = g.wavenumber(k), b = g.wavenumber(l);
      const double lam = a * a + b * b;
      s.at(k, l) /= 11.0 / 6.0 + coeff * lam * lam;
    }
  }
  return HistoryWindow{inverse(s), window.u_n, window.u_nm1, t_next, window.step_index + 1};
}

}  // namespace nss::reference
