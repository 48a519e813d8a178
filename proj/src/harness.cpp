#include "nss/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "nss/initial.hpp"
#include "nss/io.hpp"
#include "nss/kernels.hpp"

namespace nss::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::converge_time:
      return "converge-time";
    case Mode::converge_space:
      return "converge-space";
    case Mode::coarsen:
      return "coarsen";
    case Mode::resume:
      return "resume";
  }
  return "unknown";
}

Mode mode_from_string(const std::string& name) {
  if (name == "converge-time") return Mode::converge_time;
  if (name == "converge-space") return Mode::converge_space;
  if (name == "coarsen") return Mode::coarsen;
  if (name == "resume") return Mode::resume;
  throw NssError("invalid-config", "unknown mode '" + name + "'");
}

namespace {

std::string starter_name(StarterKind s) { return s == StarterKind::rk3 ? "rk3" : "trivial"; }

StarterKind starter_from(const std::string& s) {
  if (s == "rk3") return StarterKind::rk3;
  if (s == "trivial" || s == "trivial-copy") return StarterKind::trivial_copy;
  throw NssError("invalid-config", "unknown starter '" + s + "' (expected trivial|rk3)");
}

std::string forcing_name(ForcingMode f) {
  return f == ForcingMode::analytic ? "analytic" : "discrete";
}

ForcingMode forcing_from(const std::string& s) {
  if (s == "analytic") return ForcingMode::analytic;
  if (s == "discrete") return ForcingMode::discrete;
  throw NssError("invalid-config", "unknown forcing '" + s + "' (expected discrete|analytic)");
}

std::vector<std::int64_t> range(std::int64_t first, std::int64_t stride, std::int64_t last) {
  std::vector<std::int64_t> out;
  for (auto v = first; v <= last; v += stride) out.push_back(v);
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(Mode mode) {
  ExperimentConfig c;
  c.mode = mode;
  switch (mode) {
    case Mode::converge_time:
      c.params = {0.05, 1.0, 1.0};
      c.n = 64;
      c.final_time = 1.0;
      c.nt_list = range(100, 100, 1000);
      c.starter = StarterKind::rk3;
      break;
    case Mode::converge_space: {
      c.params = {0.05, 1.0, 1.0};
      c.final_time = 1.0;
      c.dt = 1e-4;
      for (auto v : range(64, 8, 144)) c.n_list.push_back(static_cast<int>(v));
      c.starter = StarterKind::rk3;
      break;
    }
    case Mode::coarsen:
    case Mode::resume:
      c.params = {0.02, 12.8, 0.5};
      c.n = 512;
      c.dt_schedule = {{400.0, 0.004}, {6000.0, 0.04}, {3e5, 0.16}};
      c.diag_every = {10, 10, 25};
      c.snapshot_at = {200, 400, 3000, 6000, 20000, 40000, 80000, 300000};
      c.starter = StarterKind::trivial_copy;
      break;
  }
  return c;
}

std::vector<DtStage> ExperimentConfig::resolved_schedule() const {
  if (!final_time) return dt_schedule;
  std::vector<DtStage> out;
  for (const auto& stage : dt_schedule) {
    if (stage.t_end >= *final_time) {
      out.push_back({*final_time, stage.dt});
      return out;
    }
    out.push_back(stage);
  }
  if (!out.empty()) out.back().t_end = *final_time;
  return out;
}

void ExperimentConfig::validate() const {
  params.validate();
  switch (mode) {
    case Mode::converge_time:
      if (nt_list.empty()) throw NssError("invalid-config", "converge-time needs --nt-list");
      if (!final_time || !(*final_time > 0.0)) {
        throw NssError("invalid-config", "converge-time needs T > 0");
      }
      break;
    case Mode::converge_space:
      if (n_list.empty()) throw NssError("invalid-config", "converge-space needs a grid list");
      if (!(dt > 0.0)) throw NssError("invalid-config", "converge-space needs dt > 0");
      break;
    case Mode::coarsen:
    case Mode::resume:
      if (resolved_schedule().empty()) throw NssError("invalid-config", "empty dt schedule");
      break;
  }
  if (init != "random" && init != "smooth" && init != "zero") {
    throw NssError("invalid-config", "unknown init profile '" + init + "'");
  }
}

json to_json(const ExperimentConfig& c) {
  json schedule = json::array();
  for (const auto& s : c.dt_schedule) schedule.push_back({s.t_end, s.dt});
  json j = {
      {"mode", to_string(c.mode)},
      {"epsilon", c.params.epsilon},
      {"A", c.params.A},
      {"L", c.params.length},
      {"N", c.n},
      {"nt_list", c.nt_list},
      {"n_list", c.n_list},
      {"dt", c.dt},
      {"dt_schedule", schedule},
      {"seed", c.seed},
      {"init", c.init},
      {"out", c.out_dir},
      {"snapshot_at", c.snapshot_at},
      {"diag_every", c.diag_every},
      {"starter", starter_name(c.starter)},
      {"dealias", c.dealias},
      {"forcing", forcing_name(c.forcing)},
      {"fit_window", {c.fit_window.t_min, c.fit_window.t_max}},
      {"checkpoint_every", c.checkpoint_every},
      {"export_text", c.export_text},
  };
  j["T"] = c.final_time ? json(*c.final_time) : json(nullptr);
  j["stop_after_steps"] = c.stop_after_steps ? json(*c.stop_after_steps) : json(nullptr);
  return j;
}

ExperimentConfig apply_json(ExperimentConfig c, const json& j) {
  try {
    if (j.contains("mode")) c.mode = mode_from_string(j["mode"].get<std::string>());
    if (j.contains("epsilon")) c.params.epsilon = j["epsilon"].get<double>();
    if (j.contains("A")) c.params.A = j["A"].get<double>();
    if (j.contains("L")) c.params.length = j["L"].get<double>();
    if (j.contains("N")) c.n = j["N"].get<int>();
    if (j.contains("T")) {
      c.final_time = j["T"].is_null() ? std::nullopt : std::optional(j["T"].get<double>());
    }
    if (j.contains("nt_list")) c.nt_list = j["nt_list"].get<std::vector<std::int64_t>>();
    if (j.contains("n_list")) c.n_list = j["n_list"].get<std::vector<int>>();
    if (j.contains("dt")) c.dt = j["dt"].get<double>();
    if (j.contains("dt_schedule")) {
      c.dt_schedule.clear();
      for (const auto& s : j["dt_schedule"]) c.dt_schedule.push_back({s.at(0), s.at(1)});
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("init")) c.init = j["init"].get<std::string>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("snapshot_at")) c.snapshot_at = j["snapshot_at"].get<std::vector<double>>();
    if (j.contains("diag_every")) c.diag_every = j["diag_every"].get<std::vector<std::int64_t>>();
    if (j.contains("starter")) c.starter = starter_from(j["starter"].get<std::string>());
    if (j.contains("dealias")) c.dealias = j["dealias"].get<bool>();
    if (j.contains("forcing")) c.forcing = forcing_from(j["forcing"].get<std::string>());
    if (j.contains("fit_window")) {
      c.fit_window = {j["fit_window"].at(0).get<double>(), j["fit_window"].at(1).get<double>()};
    }
    if (j.contains("checkpoint_every")) c.checkpoint_every = j["checkpoint_every"].get<std::int64_t>();
    if (j.contains("stop_after_steps")) {
      c.stop_after_steps = j["stop_after_steps"].is_null()
                               ? std::nullopt
                               : std::optional(j["stop_after_steps"].get<std::int64_t>());
    }
    if (j.contains("export_text")) c.export_text = j["export_text"].get<bool>();
  } catch (const json::exception& e) {
    throw NssError("invalid-config", std::string("bad config value: ") + e.what());
  }
  return c;
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw NssError("invalid-config", "not a number: '" + s + "'");
  return v;
}

std::int64_t to_int(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw NssError("invalid-config", "not an integer: '" + s + "'");
  return v;
}

}  // namespace

std::vector<DtStage> parse_schedule(const std::string& text) {
  std::vector<DtStage> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) {
      throw NssError("invalid-config", "schedule entries look like t_end:dt, got '" + item + "'");
    }
    out.push_back({to_double(parts[0]), to_double(parts[1])});
  }
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(item));
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 3) {
      const auto first = to_int(parts[0]), stride = to_int(parts[1]), last = to_int(parts[2]);
      if (stride <= 0) throw NssError("invalid-config", "range stride must be positive");
      for (auto v = first; v <= last; v += stride) out.push_back(v);
    } else if (parts.size() == 1) {
      out.push_back(to_int(parts[0]));
    } else {
      throw NssError("invalid-config", "bad list entry '" + item + "'");
    }
  }
  return out;
}

RealField2D initial_field(const ExperimentConfig& config, const GridSpec& grid) {
  if (config.init == "zero") return RealField2D(grid);
  if (config.init == "smooth") return smooth_random_field(grid, config.seed, 6, 1.0, 0.0);
  return random_field(grid, config.seed, 0.05);
}

// ---------------------------------------------------------------------------
// Convergence studies

ConvergenceRow manufactured_run(const ModelParams& params, int n, double final_time,
                                std::int64_t steps, StarterKind starter, ForcingMode forcing,
                                bool dealias) {
  const GridSpec grid(n, params.length);
  const SpectralGrid ops(grid);
  auto source = std::make_shared<ManufacturedForcing>(ops, params, forcing);
  SchemeConfig scheme;
  scheme.params = params;
  scheme.grid = grid;
  scheme.dt_schedule = {{final_time, final_time / static_cast<double>(steps)}};
  scheme.init_strategy = starter;
  scheme.dealias = dealias;
  scheme.forcing = [source](const SpectralGrid& o, double t) { return (*source)(o, t); };
  const auto state = run(scheme, exact_profile(0.0, grid));
  const auto error = kernels::difference(state.window.u_n, exact_profile(final_time, grid));
  return ConvergenceRow{n, steps, scheme.dt_schedule.front().dt, norm_l2(error), norm_inf(error)};
}

namespace {

std::optional<FitResult> order_fit(const std::vector<ConvergenceRow>& rows, bool l2) {
  Series series;
  for (const auto& r : rows) {
    const double e = l2 ? r.error_l2 : r.error_inf;
    if (e > 0.0) series.emplace_back(static_cast<double>(r.nt), e);
  }
  if (series.size() < 3) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  return fit_power_law(series, FitWindow{lo->first, hi->first});
}

}  // namespace

ConvergenceResult converge_time(const ExperimentConfig& config) {
  config.validate();
  ConvergenceResult result;
  for (auto nt : config.nt_list) {
    if (nt <= 0) throw NssError("invalid-config", "N_T entries must be positive");
    result.rows.push_back(manufactured_run(config.params, config.n, *config.final_time, nt,
                                           config.starter, config.forcing, config.dealias));
  }
  result.fit_l2 = order_fit(result.rows, true);
  result.fit_inf = order_fit(result.rows, false);
  return result;
}

ConvergenceResult converge_space(const ExperimentConfig& config) {
  config.validate();
  const double final_time = config.final_time.value_or(1.0);
  const auto steps = static_cast<std::int64_t>(std::llround(final_time / config.dt));
  ConvergenceResult result;
  for (int n : config.n_list) {
    result.rows.push_back(manufactured_run(config.params, n, final_time, steps, config.starter,
                                           config.forcing, config.dealias));
  }
  return result;
}

std::vector<double> successive_ratios(const std::vector<ConvergenceRow>& rows) {
  std::vector<double> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    out.push_back(rows[i].error_l2 / rows[i - 1].error_l2);
  }
  return out;
}

bool non_increasing_until_floor(const std::vector<ConvergenceRow>& rows, double floor) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i - 1].error_l2 < floor) return true;
    if (rows[i].error_l2 > rows[i - 1].error_l2) return false;
  }
  return true;
}

bool ratios_decrease_until_floor(const std::vector<ConvergenceRow>& rows, double floor) {
  for (std::size_t i = 2; i < rows.size(); ++i) {
    if (rows[i].error_l2 < floor) return true;
    const double previous = rows[i - 1].error_l2 / rows[i - 2].error_l2;
    const double current = rows[i].error_l2 / rows[i - 1].error_l2;
    if (!(current < previous)) return false;
  }
  return true;
}

namespace {

std::string num(double v) { return format_number(v); }

json fit_json(const std::optional<FitResult>& fit) {
  if (!fit) return nullptr;
  return {{"model", fit->model == FitModel::log_law ? "log-law" : "power-law"},
          {"a", fit->a},
          {"b", fit->b},
          {"t_min", fit->t_min},
          {"t_max", fit->t_max},
          {"points", fit->points},
          {"residual_rms", fit->residual_rms}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw NssError("write-failed", "cannot write " + path.string());
}

}  // namespace

void write_convergence_table(const fs::path& path, const ConvergenceResult& result) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw NssError("write-failed", "cannot open " + path.string());
  out << "n,nt,dt,error_l2,error_inf\n";
  for (const auto& r : result.rows) {
    out << r.n << ',' << r.nt << ',' << num(r.dt) << ',' << num(r.error_l2) << ','
        << num(r.error_inf) << '\n';
  }
  if (!out) throw NssError("write-failed", "error while writing " + path.string());
}

// ---------------------------------------------------------------------------
// Coarsening

SchemeConfig scheme_for(const ExperimentConfig& config) {
  SchemeConfig scheme;
  scheme.params = config.params;
  scheme.grid = GridSpec(config.n, config.params.length);
  scheme.dt_schedule = config.resolved_schedule();
  scheme.init_strategy = config.starter;
  scheme.dealias = config.dealias;
  return scheme;
}

namespace {

/// Streams diagnostics, snapshots and checkpoints for one coarsening run.
class RunOutput {
 public:
  RunOutput(const ExperimentConfig& config, bool appending) : config_(config) {
    if (config.out_dir.empty()) return;
    dir_ = config.out_dir;
    fs::create_directories(dir_);
    write_json(dir_ / "config.json", to_json(config));
    const auto csv = dir_ / "diagnostics.csv";
    const bool exists = fs::exists(csv);
    csv_.open(csv, appending && exists ? std::ios::app : std::ios::trunc);
    if (!csv_) throw NssError("write-failed", "cannot open " + csv.string());
    if (!(appending && exists)) csv_ << kDiagnosticsHeader << '\n';
  }

  bool enabled() const { return !dir_.empty(); }

  void row(const DiagnosticsRow& r) {
    if (!enabled()) return;
    csv_ << format_row(r) << '\n';
    if (!csv_) throw NssError("write-failed", "cannot append to diagnostics.csv");
  }

  void snapshot(double label, const io::FieldHeader& header, const RealField2D& field) {
    if (!enabled()) return;
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_t%g", label);
    const auto path = dir_ / (std::string(name) + ".bin");
    io::write_snapshot(path, header, field);
    sidecar(path);
    if (config_.export_text) io::write_text_matrix(dir_ / (std::string(name) + ".txt"), field);
  }

  void checkpoint(const io::FieldHeader& header, const HistoryWindow& window) {
    if (!enabled()) return;
    const auto path = dir_ / "checkpoint.bin";
    io::write_checkpoint(path, header, window);
    sidecar(path);
  }

  void report(const json& j) {
    if (!enabled()) return;
    csv_.flush();
    write_json(dir_ / "fit_report.json", j);
  }

  const fs::path& dir() const { return dir_; }

 private:
  void sidecar(const fs::path& path) {
    write_json(fs::path(path.string() + ".json"), to_json(config_));
  }

  const ExperimentConfig& config_;
  fs::path dir_;
  std::ofstream csv_;
};

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

std::vector<DiagnosticsRow> read_diagnostics(const fs::path& path) {
  std::vector<DiagnosticsRow> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    while (f.size() < 9) f.emplace_back();
    DiagnosticsRow r;
    r.step = std::stoll(f[0]);
    r.t = std::stod(f[1]);
    r.energy = std::stod(f[2]);
    r.modified_energy = parse_optional(f[3]);
    r.roughness = std::stod(f[4]);
    r.slope = std::stod(f[5]);
    r.length = parse_optional(f[6]);
    r.mass = std::stod(f[7]);
    r.dt = std::stod(f[8]);
    rows.push_back(r);
  }
  return rows;
}

template <class Fit>
std::optional<FitResult> try_fit(Fit&& fit) {
  try {
    return fit();
  } catch (const NssError&) {
    return std::nullopt;
  }
}

void summarise(CoarsenResult& result, const std::vector<DiagnosticsRow>& all,
               const ExperimentConfig& config) {
  Series energy, height, slope;
  for (const auto& r : all) {
    energy.emplace_back(r.t, r.energy);
    height.emplace_back(r.t, r.roughness);
    slope.emplace_back(r.t, r.slope);
  }
  result.energy_fit = try_fit([&] { return fit_log_law(energy, config.fit_window); });
  result.roughness_fit = try_fit([&] { return fit_power_law(height, config.fit_window); });
  result.slope_fit = try_fit([&] { return fit_power_law(slope, config.fit_window); });
  const double gamma = energy_lower_bound(config.params.epsilon, config.params.length);
  if (result.energy_fit) {
    result.saturation = saturation_report(energy, gamma, *result.energy_fit);
  } else {
    result.saturation = SaturationReport{detect_saturation(energy), std::nullopt, gamma};
  }
  result.energy_increases = 0;
  result.below_gamma = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].energy < gamma) ++result.below_gamma;
    if (i > 0 && all[i].energy > all[i - 1].energy + 1e-12 * std::abs(all[i - 1].energy)) {
      ++result.energy_increases;
    }
  }
}

json report_json(const CoarsenResult& r, const ExperimentConfig& config) {
  json sat = {{"gamma", r.saturation.gamma}};
  sat["saturation_time"] =
      r.saturation.saturation_time ? json(*r.saturation.saturation_time) : json(nullptr);
  sat["predicted_crossing"] =
      r.saturation.predicted_crossing ? json(*r.saturation.predicted_crossing) : json(nullptr);
  return {{"config", to_json(config)},
          {"finished", r.finished},
          {"final_time", r.final_state.window.time},
          {"final_step", r.final_state.window.step_index},
          {"energy_fit", fit_json(r.energy_fit)},
          {"roughness_fit", fit_json(r.roughness_fit)},
          {"slope_fit", fit_json(r.slope_fit)},
          {"saturation", sat},
          {"energy_increases", r.energy_increases},
          {"rows_below_gamma", r.below_gamma}};
}

CoarsenResult drive(const ExperimentConfig& config, const SchemeConfig& scheme,
                    std::optional<RunState> resume_from, std::vector<DiagnosticsRow> earlier) {
  const SpectralGrid ops(scheme.grid);
  RunOutput out(config, resume_from.has_value());
  CoarsenResult result;

  auto snapshots = config.snapshot_at;
  std::sort(snapshots.begin(), snapshots.end());
  std::size_t next_snapshot = 0;
  if (resume_from) {
    const double t = resume_from->window.time;
    const double dt = scheme.dt_schedule.at(std::min<std::size_t>(
                                                resume_from->stage_index,
                                                scheme.dt_schedule.size() - 1))
                          .dt;
    while (next_snapshot < snapshots.size() && snapshots[next_snapshot] < t + 0.5 * dt) {
      ++next_snapshot;
    }
  }

  RunCallbacks callbacks;
  callbacks.max_steps = config.stop_after_steps;
  callbacks.on_step = [&](const StepInfo& info) {
    const auto& w = info.window;
    const auto s = static_cast<std::size_t>(info.stage_index);
    const auto every =
        config.diag_every.empty() ? 1 : config.diag_every[std::min(s, config.diag_every.size() - 1)];
    const auto total = stage_steps(scheme, info.stage_index);
    if ((every > 0 && info.step_in_stage % every == 0) || info.step_in_stage == total) {
      auto row = make_row(ops, scheme.params, w.u_n, w.u_nm1, w.u_nm2, w.step_index, w.time,
                          info.dt, info.step_in_stage >= 2);
      out.row(row);
      result.rows.push_back(row);
    }
    while (next_snapshot < snapshots.size() && w.time >= snapshots[next_snapshot] - 0.5 * info.dt) {
      out.snapshot(snapshots[next_snapshot],
                   io::FieldHeader::make(scheme.params, w, info.stage_index), w.u_n);
      ++next_snapshot;
    }
    if (config.checkpoint_every > 0 && w.step_index % config.checkpoint_every == 0) {
      out.checkpoint(io::FieldHeader::make(scheme.params, w, info.stage_index), w);
    }
  };

  if (resume_from) {
    result.final_state = continue_run(scheme, std::move(*resume_from), callbacks);
  } else {
    result.final_state =
        run(scheme, initial_field(config, scheme.grid), callbacks);
  }
  result.finished =
      result.final_state.stage_index >= static_cast<int>(scheme.dt_schedule.size());
  out.checkpoint(io::FieldHeader::make(scheme.params, result.final_state.window,
                                       result.final_state.stage_index),
                 result.final_state.window);

  earlier.insert(earlier.end(), result.rows.begin(), result.rows.end());
  summarise(result, earlier, config);
  out.report(report_json(result, config));
  return result;
}

}  // namespace

CoarsenResult coarsen(const ExperimentConfig& config) {
  config.validate();
  return drive(config, scheme_for(config), std::nullopt, {});
}

CoarsenResult resume(const fs::path& checkpoint, const ExperimentConfig& config,
                     bool restart_schedule) {
  config.validate();
  auto saved = io::read_checkpoint(checkpoint);
  const GridSpec grid(config.n, config.params.length);
  if (!(saved.window.grid() == grid)) {
    throw NssError("grid-mismatch", "checkpoint grid N=" + std::to_string(saved.header.n) +
                                        ", L=" + num(saved.header.length) +
                                        " does not match requested N=" + std::to_string(grid.n) +
                                        ", L=" + num(grid.length));
  }
  auto scheme = scheme_for(config);
  const double t = saved.window.time;
  RunState state;
  if (restart_schedule) {
    std::vector<DtStage> remaining;
    for (const auto& s : scheme.dt_schedule) {
      if (s.t_end > t) remaining.push_back(s);
    }
    if (remaining.empty()) throw NssError("invalid-schedule", "schedule ends before checkpoint");
    scheme.dt_schedule = remaining;
    scheme.start_time = t;
    state.stage_index = 0;
    state.step_in_stage = 0;
    state.restart = true;
  } else {
    state.stage_index = static_cast<int>(saved.header.stage_index);
    if (state.stage_index < static_cast<int>(scheme.dt_schedule.size())) {
      const double dt = scheme.dt_schedule[state.stage_index].dt;
      state.step_in_stage = static_cast<std::int64_t>(
          std::llround((t - stage_start(scheme, state.stage_index)) / dt));
      if (state.step_in_stage < 0 || state.step_in_stage > stage_steps(scheme, state.stage_index)) {
        throw NssError("invalid-schedule", "checkpoint time lies outside its recorded stage");
      }
      state.restart = state.step_in_stage == 0;
    }
  }
  state.window = std::move(saved.window);
  std::vector<DiagnosticsRow> earlier;
  if (!config.out_dir.empty()) earlier = read_diagnostics(fs::path(config.out_dir) / "diagnostics.csv");
  return drive(config, scheme, std::move(state), std::move(earlier));
}

}  // namespace nss::harness
