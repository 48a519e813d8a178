#include "nss/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "nss/kernels.hpp"

namespace nss {

double roughness(const RealField2D& u) {
  const double avg = mean(u);
  const auto centred = kernels::affine(u, 1.0, -avg);
  const double area = u.grid().length * u.grid().length;
  return std::sqrt(inner_product(centred, centred) / area);
}

double average_slope(const SpectralGrid& ops, const RealField2D& u) {
  const double area = u.grid().length * u.grid().length;
  return std::sqrt(sum_of_squares(ops.gradient(u)) / area);
}

DiagnosticsRow make_row(const SpectralGrid& ops, const ModelParams& params, const RealField2D& u_n,
                        const RealField2D& u_nm1, const RealField2D& u_nm2, std::int64_t step,
                        double t, double dt, bool modified) {
  DiagnosticsRow row;
  row.step = step;
  row.t = t;
  row.dt = dt;
  row.energy = discrete_energy(ops, u_n, params).total;
  if (modified) row.modified_energy = modified_energy(ops, u_n, u_nm1, u_nm2, dt, params);
  row.roughness = roughness(u_n);
  row.slope = average_slope(ops, u_n);
  if (row.slope > 0.0) row.length = row.roughness / row.slope;
  row.mass = mean(u_n);
  return row;
}

std::string format_number(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace {

std::string num(double v) { return format_number(v); }

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw NssError("degenerate-fit", "fit needs at least two distinct times");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

void select(const Series& series, FitWindow window, bool positive_y, std::vector<double>& x,
            std::vector<double>& y, bool log_y) {
  if (!(window.t_max >= window.t_min)) throw NssError("invalid-fit", "fit window is empty");
  for (const auto& [t, v] : series) {
    if (t < window.t_min || t > window.t_max || !(t > 0.0)) continue;
    if (positive_y && !(v > 0.0)) {
      throw NssError("invalid-fit", "power-law fit needs positive data, got " + num(v) +
                                        " at t=" + num(t));
    }
    x.push_back(std::log(t));
    y.push_back(log_y ? std::log(v) : v);
  }
  if (x.size() < 3) {
    throw NssError("insufficient-points", "fit needs at least 3 points with t in [" +
                                              num(window.t_min) + ", " + num(window.t_max) +
                                              "], found " + std::to_string(x.size()));
  }
}

}  // namespace

std::string format_row(const DiagnosticsRow& row) {
  return std::to_string(row.step) + "," + num(row.t) + "," + num(row.energy) + "," +
         opt(row.modified_energy) + "," + num(row.roughness) + "," + num(row.slope) + "," +
         opt(row.length) + "," + num(row.mass) + "," + num(row.dt);
}

FitResult fit_log_law(const Series& series, FitWindow window) {
  std::vector<double> x, y;
  select(series, window, false, x, y, false);
  const auto line = least_squares(x, y);
  return FitResult{FitModel::log_law, line.slope, line.intercept, window.t_min, window.t_max,
                   x.size(), line.residual_rms};
}

FitResult fit_power_law(const Series& series, FitWindow window) {
  std::vector<double> x, y;
  select(series, window, true, x, y, true);
  const auto line = least_squares(x, y);
  return FitResult{FitModel::power_law, std::exp(line.intercept), line.slope, window.t_min,
                   window.t_max, x.size(), line.residual_rms};
}

std::optional<double> detect_saturation(const Series& energy, SaturationOptions options) {
  Series pts;
  for (const auto& p : energy) {
    if (p.first > 0.0) pts.push_back(p);
  }
  if (pts.size() < 3) return std::nullopt;
  const double final_value = pts.back().second;
  double band = options.band * std::abs(final_value);
  if (band == 0.0) {
    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](auto& a, auto& b) {
      return a.second < b.second;
    });
    band = options.band * (hi->second - lo->second);
  }
  std::size_t first = pts.size() - 1;
  while (first > 0 && std::abs(pts[first - 1].second - final_value) <= band) --first;
  if (first == 0) return std::nullopt;  // never left the band: nothing to saturate from
  const double span = std::log(pts.back().first) - std::log(pts.front().first);
  const double tail = std::log(pts.back().first) - std::log(pts[first].first);
  if (pts.size() - first < 2 || tail < options.min_tail_fraction * span) return std::nullopt;
  return pts[first].first;
}

std::optional<double> log_law_crossing(const FitResult& fit, double gamma) {
  if (fit.model != FitModel::log_law || !(fit.a < 0.0)) return std::nullopt;
  return std::exp((gamma - fit.b) / fit.a);
}

SaturationReport saturation_report(const Series& energy, double gamma, const FitResult& energy_fit,
                                   SaturationOptions options) {
  return SaturationReport{detect_saturation(energy, options), log_law_crossing(energy_fit, gamma),
                          gamma};
}

}  // namespace nss
