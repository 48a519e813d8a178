#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nss/diagnostics.hpp"
#include "nss/model.hpp"
#include "nss/stepper.hpp"

namespace nss::harness {

enum class Mode { converge_time, converge_space, coarsen, resume };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

/// Fully resolved experiment description. Every output directory receives a
/// copy as config.json.
struct ExperimentConfig {
  Mode mode = Mode::coarsen;
  ModelParams params;
  int n = 64;
  std::optional<double> final_time;       ///< --T
  std::vector<std::int64_t> nt_list;      ///< converge-time
  std::vector<int> n_list;                ///< converge-space
  double dt = 1e-4;                       ///< converge-space
  std::vector<DtStage> dt_schedule;       ///< coarsen / resume
  std::uint64_t seed = 1;
  std::string init = "random";            ///< random | smooth | zero
  std::string out_dir;
  std::vector<double> snapshot_at;
  std::vector<std::int64_t> diag_every{10};
  StarterKind starter = StarterKind::trivial_copy;
  bool dealias = false;
  ForcingMode forcing = ForcingMode::discrete;
  FitWindow fit_window;
  std::int64_t checkpoint_every = 0;      ///< 0: only at the end
  std::optional<std::int64_t> stop_after_steps;
  bool export_text = false;

  /// Default experiment settings for each mode.
  static ExperimentConfig defaults(Mode mode);
  /// Schedule actually run: dt_schedule truncated at final_time when given.
  std::vector<DtStage> resolved_schedule() const;
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Overlays the keys present in `j` onto `base`.
ExperimentConfig apply_json(ExperimentConfig base, const nlohmann::json& j);

/// "t1:dt1,t2:dt2" -> stages
std::vector<DtStage> parse_schedule(const std::string& text);
std::vector<double> parse_list(const std::string& text);
/// "100:100:1000" ranges or comma lists of integers.
std::vector<std::int64_t> parse_int_list(const std::string& text);

RealField2D initial_field(const ExperimentConfig& config, const GridSpec& grid);

// Convergence studies against the manufactured solution.

struct ConvergenceRow {
  int n = 0;
  std::int64_t nt = 0;
  double dt = 0.0;
  double error_l2 = 0.0;
  double error_inf = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  /// ln e vs ln N_T (time) fits; b is the slope.
  std::optional<FitResult> fit_l2;
  std::optional<FitResult> fit_inf;
};

/// Error of one manufactured-solution run at final time T.
ConvergenceRow manufactured_run(const ModelParams& params, int n, double final_time,
                                std::int64_t steps, StarterKind starter, ForcingMode forcing,
                                bool dealias);

ConvergenceResult converge_time(const ExperimentConfig& config);
ConvergenceResult converge_space(const ExperimentConfig& config);

/// e(N_{i+1}) / e(N_i) for consecutive rows, using the l2 error.
std::vector<double> successive_ratios(const std::vector<ConvergenceRow>& rows);
/// True when errors are non-increasing in N until they first drop below floor.
bool non_increasing_until_floor(const std::vector<ConvergenceRow>& rows, double floor);
/// True when the successive ratios strictly decrease until errors drop below floor.
bool ratios_decrease_until_floor(const std::vector<ConvergenceRow>& rows, double floor);

void write_convergence_table(const std::filesystem::path& path, const ConvergenceResult& result);

// Coarsening.

struct CoarsenResult {
  std::vector<DiagnosticsRow> rows;
  std::optional<FitResult> energy_fit;
  std::optional<FitResult> roughness_fit;
  std::optional<FitResult> slope_fit;
  SaturationReport saturation;
  RunState final_state;
  bool finished = false;
  std::int64_t energy_increases = 0;  ///< sampled rows where E_N went up
  std::int64_t below_gamma = 0;       ///< sampled rows with E_N < gamma
};

CoarsenResult coarsen(const ExperimentConfig& config);

/// Continues from a checkpoint. With `restart_schedule` the schedule is rebased
/// at the checkpoint time and the history is re-initialised by trivial copy.
CoarsenResult resume(const std::filesystem::path& checkpoint, const ExperimentConfig& config,
                     bool restart_schedule);

SchemeConfig scheme_for(const ExperimentConfig& config);

}  // namespace nss::harness
