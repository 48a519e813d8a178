#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nss/grid.hpp"
#include "nss/model.hpp"
#include "nss/spectral.hpp"

namespace nss {

struct DiagnosticsRow {
  std::int64_t step = 0;
  double t = 0.0;
  double energy = 0.0;
  std::optional<double> modified_energy;  ///< absent on the first two steps of a stage
  double roughness = 0.0;
  double slope = 0.0;
  std::optional<double> length;  ///< roughness / slope, only when slope > 0
  double mass = 0.0;
  double dt = 0.0;
};

inline constexpr const char* kDiagnosticsHeader =
    "step,t,energy,modified_energy,roughness,slope,length,mass,dt";

/// Surface roughness h = sqrt(1/L^2 * h^2 sum (u - mean)^2).
double roughness(const RealField2D& u);
/// Mound slope m = sqrt(1/L^2 * ||grad_N u||^2).
double average_slope(const SpectralGrid& ops, const RealField2D& u);

/// Diagnostics for the window's newest field. `modified` selects whether the
/// modified energy is reported (it needs three genuine history levels).
DiagnosticsRow make_row(const SpectralGrid& ops, const ModelParams& params, const RealField2D& u_n,
                        const RealField2D& u_nm1, const RealField2D& u_nm2, std::int64_t step,
                        double t, double dt, bool modified);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

std::string format_row(const DiagnosticsRow& row);

enum class FitModel { log_law, power_law };

struct FitResult {
  FitModel model = FitModel::log_law;
  double a = 0.0;
  double b = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t points = 0;
  double residual_rms = 0.0;
};

struct FitWindow {
  double t_min = 10.0;
  double t_max = 400.0;
};

using Series = std::vector<std::pair<double, double>>;

/// y = a ln t + b by ordinary least squares over points with t in the window.
FitResult fit_log_law(const Series& series, FitWindow window);
/// y = a t^b, fitted as ln y = ln a + b ln t.
FitResult fit_power_law(const Series& series, FitWindow window);

struct SaturationOptions {
  double band = 0.01;           ///< relative to |final energy|
  double min_tail_fraction = 0.1;  ///< of the series' ln t span
};

struct SaturationReport {
  std::optional<double> saturation_time;
  /// t at which the fitted log law reaches gamma, when the fit slopes downwards.
  std::optional<double> predicted_crossing;
  double gamma = 0.0;
};

/// Earliest t after which the energy stays within the band of its final value,
/// provided that tail covers at least min_tail_fraction of the ln t range.
std::optional<double> detect_saturation(const Series& energy, SaturationOptions options = {});

/// Closed-form t where a ln t + b == gamma.
std::optional<double> log_law_crossing(const FitResult& fit, double gamma);

SaturationReport saturation_report(const Series& energy, double gamma, const FitResult& energy_fit,
                                   SaturationOptions options = {});

}  // namespace nss
