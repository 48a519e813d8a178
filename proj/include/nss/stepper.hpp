#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nss/grid.hpp"
#include "nss/model.hpp"
#include "nss/spectral.hpp"

namespace nss {

/// The BDF3 stencil: u^n, u^{n-1}, u^{n-2} and the time of u^n.
struct HistoryWindow {
  RealField2D u_n;
  RealField2D u_nm1;
  RealField2D u_nm2;
  double time = 0.0;
  std::int64_t step_index = 0;

  const GridSpec& grid() const noexcept { return u_n.grid(); }
  void validate() const;
};

struct DtStage {
  double t_end = 0.0;
  double dt = 0.0;
};

enum class StarterKind { trivial_copy, rk3 };

/// Time-dependent source f(t) sampled on the grid.
using ForcingFn = std::function<RealField2D(const SpectralGrid&, double t)>;

struct SchemeConfig {
  ModelParams params;
  GridSpec grid;
  std::vector<DtStage> dt_schedule;
  StarterKind init_strategy = StarterKind::trivial_copy;
  ForcingFn forcing;
  bool dealias = false;
  double start_time = 0.0;
  /// Upper bound on explicit RK3 substeps per starter step.
  std::int64_t max_rk3_substeps = 5'000'000;

  void validate() const;
};

/// Per-mode denominator 11/6 + (eps^2 dt + A dt^3) lambda^2 of the implicit update.
class ImplicitSymbol {
 public:
  ImplicitSymbol(const SpectralGrid& ops, const ModelParams& params, double dt);

  Spectrum2D solve(const Spectrum2D& rhs) const;
  Spectrum2D apply(const Spectrum2D& s) const;

  const GridSpec& grid() const noexcept { return grid_; }
  double dt() const noexcept { return dt_; }
  const std::vector<double>& denominators() const noexcept { return denom_; }

 private:
  GridSpec grid_;
  double dt_;
  std::vector<double> denom_;
};

/// Advances a HistoryWindow with the third-order BDF scheme. Transforms and
/// nonlinear spectra of the three stored levels are cached between steps; the
/// cache is a pure function of the stored fields, so a stepper rebuilt from a
/// window continues bit-for-bit.
class Bdf3Stepper {
 public:
  Bdf3Stepper(const SpectralGrid& ops, const SchemeConfig& config, HistoryWindow window,
              double dt);

  void advance();
  const HistoryWindow& window() const noexcept { return window_; }
  double dt() const noexcept { return dt_; }

  /// Replace the window (e.g. trivial-copy restart) keeping grid and dt.
  void reset(HistoryWindow window);

 private:
  struct Level {
    Spectrum2D u_hat;
    Spectrum2D nonlinear_hat;
  };
  Level make_level(const RealField2D& u) const;

  const SpectralGrid* ops_;
  const SchemeConfig* config_;
  HistoryWindow window_;
  double dt_;
  ImplicitSymbol symbol_;
  std::array<Level, 3> levels_;  // n, n-1, n-2
};

/// One scheme step on a copy of the window.
HistoryWindow step(const HistoryWindow& window, const SchemeConfig& config, double dt);

/// Fills u^{-1}, u^{-2} by copying u0, or computes u^1, u^2 with an explicit SSP-RK3 start.
HistoryWindow init_history(const RealField2D& u0, const SchemeConfig& config, double dt);
HistoryWindow init_history(const SpectralGrid& ops, const RealField2D& u0,
                           const SchemeConfig& config, double dt, double t0,
                           std::int64_t step_index = 0);

/// Explicit SSP-RK3 integration of the semi-discrete equation over [t0, t0 + dt].
/// Substeps satisfy h * max(eps^2 lambda_max^2, lambda_max) <= 1.
RealField2D rk3_integrate(const SpectralGrid& ops, const RealField2D& u, double t0, double dt,
                          const SchemeConfig& config);
std::int64_t rk3_substeps(const SpectralGrid& ops, const ModelParams& params, double dt);

/// Where a (possibly interrupted) staged run stands.
struct RunState {
  HistoryWindow window;
  int stage_index = 0;
  std::int64_t step_in_stage = 0;
  /// Re-initialise the window by trivial copy before the next step.
  bool restart = false;
};

struct StepInfo {
  const HistoryWindow& window;
  int stage_index;
  std::int64_t step_in_stage;
  double dt;
  double mass_drift;     ///< mean(u^n) - mean(u^0); 0 when unmonitored
  bool mass_monitored;   ///< false when the forcing has nonzero mean
};

struct RunCallbacks {
  /// Called after stage initialisation and after every step.
  std::function<void(const StepInfo&)> on_step;
  /// Stop after this many scheme steps in this call (absent: run to the end).
  std::optional<std::int64_t> max_steps;
};

/// Number of uniform steps of stage `index` starting from its start time.
std::int64_t stage_steps(const SchemeConfig& config, int index);
double stage_start(const SchemeConfig& config, int index);

/// Integrates the whole schedule from u0.
RunState run(const SchemeConfig& config, const RealField2D& u0, const RunCallbacks& callbacks = {});

/// Continues a run from a saved state. Stage boundaries restart with trivial copy.
RunState continue_run(const SchemeConfig& config, RunState state,
                      const RunCallbacks& callbacks = {});

/// Throws NssError("blow-up") if u has non-finite entries or |u|_inf > 1e6.
void check_blow_up(const RealField2D& u, double t);

}  // namespace nss
