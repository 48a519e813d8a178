// Command-line driver for the NSS thin-film simulator.
//
//   nss converge-time  [flags]   temporal order study (manufactured solution)
//   nss converge-space [flags]   spatial accuracy study
//   nss coarsen        [flags]   long-time coarsening run
//   nss resume --checkpoint PATH [overrides]

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "nss/harness.hpp"

namespace {

using namespace nss;
using namespace nss::harness;

struct Flags {
  std::string config;
  std::optional<double> epsilon, A, L, T, dt;
  std::optional<int> n;
  std::string nt_list, n_list, dt_schedule, snapshot_at, diag_every, starter, forcing, fit_window;
  std::optional<std::uint64_t> seed;
  std::string out, init;
  std::optional<std::int64_t> checkpoint_every, stop_after;
  bool dealias = false;
  bool export_text = false;
  std::string checkpoint;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file; flags override its values");
  cmd->add_option("--epsilon", f.epsilon, "transition-layer width");
  cmd->add_option("--A", f.A, "regularisation coefficient A");
  cmd->add_option("--N", f.n, "grid points per side");
  cmd->add_option("--L", f.L, "domain side length");
  cmd->add_option("--T", f.T, "final time");
  cmd->add_option("--seed", f.seed, "RNG seed for initial data");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--starter", f.starter, "history start: trivial|rk3");
  cmd->add_flag("--dealias", f.dealias, "apply the 2/3-rule filter to the nonlinear term");
}

ExperimentConfig resolve(Mode mode, const Flags& f, ExperimentConfig base) {
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw NssError("read-failed", "cannot open config " + f.config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw NssError("invalid-config", std::string("config is not valid JSON: ") + e.what());
    }
    base = apply_json(base, j);
  }
  auto c = base;
  c.mode = mode;
  if (f.epsilon) c.params.epsilon = *f.epsilon;
  if (f.A) c.params.A = *f.A;
  if (f.L) c.params.length = *f.L;
  if (f.n) c.n = *f.n;
  if (f.T) c.final_time = *f.T;
  if (f.dt) c.dt = *f.dt;
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.out_dir = f.out;
  if (!f.init.empty()) c.init = f.init;
  if (!f.nt_list.empty()) c.nt_list = parse_int_list(f.nt_list);
  if (!f.n_list.empty()) {
    c.n_list.clear();
    for (auto v : parse_int_list(f.n_list)) c.n_list.push_back(static_cast<int>(v));
  }
  if (!f.dt_schedule.empty()) c.dt_schedule = parse_schedule(f.dt_schedule);
  if (!f.snapshot_at.empty()) c.snapshot_at = parse_list(f.snapshot_at);
  if (!f.diag_every.empty()) c.diag_every = parse_int_list(f.diag_every);
  if (!f.starter.empty()) c = apply_json(c, {{"starter", f.starter}});
  if (!f.forcing.empty()) c = apply_json(c, {{"forcing", f.forcing}});
  if (!f.fit_window.empty()) {
    const auto w = parse_list(f.fit_window);
    if (w.size() != 2) throw NssError("invalid-config", "--fit-window expects tmin,tmax");
    c.fit_window = {w[0], w[1]};
  }
  if (f.checkpoint_every) c.checkpoint_every = *f.checkpoint_every;
  if (f.stop_after) c.stop_after_steps = *f.stop_after;
  if (f.dealias) c.dealias = true;
  if (f.export_text) c.export_text = true;
  return c;
}

void print_convergence(const ConvergenceResult& r, bool time_study) {
  std::printf("%6s %8s %12s %14s %14s\n", "N", "N_T", "dt", "err_l2", "err_inf");
  for (const auto& row : r.rows) {
    std::printf("%6d %8lld %12.4e %14.6e %14.6e\n", row.n, static_cast<long long>(row.nt),
                row.dt, row.error_l2, row.error_inf);
  }
  if (time_study) {
    if (r.fit_l2) std::printf("fitted slope l2:  %.4f (rms %.2e)\n", r.fit_l2->b, r.fit_l2->residual_rms);
    if (r.fit_inf) std::printf("fitted slope inf: %.4f (rms %.2e)\n", r.fit_inf->b, r.fit_inf->residual_rms);
  } else {
    const auto ratios = successive_ratios(r.rows);
    std::printf("successive l2 ratios:");
    for (double q : ratios) std::printf(" %.3e", q);
    std::printf("\nnon-increasing until 1e-9 floor: %s\n",
                non_increasing_until_floor(r.rows, 1e-9) ? "yes" : "no");
  }
}

void write_outputs(const ExperimentConfig& c, const ConvergenceResult& r) {
  if (c.out_dir.empty()) return;
  std::filesystem::create_directories(c.out_dir);
  write_convergence_table(std::filesystem::path(c.out_dir) / "errors.csv", r);
  nlohmann::json j = {{"config", to_json(c)}};
  auto fit = [](const std::optional<FitResult>& f) -> nlohmann::json {
    if (!f) return nullptr;
    return {{"a", f->a}, {"slope", f->b}, {"residual_rms", f->residual_rms}};
  };
  j["fit_l2"] = fit(r.fit_l2);
  j["fit_inf"] = fit(r.fit_inf);
  std::ofstream(std::filesystem::path(c.out_dir) / "convergence.json") << j.dump(2) << '\n';
}

void print_coarsen(const CoarsenResult& r) {
  std::printf("finished: %s  t=%.6g  steps=%lld  rows=%zu\n", r.finished ? "yes" : "no",
              r.final_state.window.time, static_cast<long long>(r.final_state.window.step_index),
              r.rows.size());
  auto show = [](const char* name, const std::optional<FitResult>& f) {
    if (f) {
      std::printf("%-10s a=%.6g b=%.6g (points %zu, rms %.2e)\n", name, f->a, f->b, f->points,
                  f->residual_rms);
    } else {
      std::printf("%-10s not enough points in fit window\n", name);
    }
  };
  show("energy", r.energy_fit);
  show("roughness", r.roughness_fit);
  show("slope", r.slope_fit);
  std::printf("gamma=%.6g  energy increases=%lld  rows below gamma=%lld\n", r.saturation.gamma,
              static_cast<long long>(r.energy_increases), static_cast<long long>(r.below_gamma));
  if (r.saturation.predicted_crossing) {
    std::printf("log-law reaches gamma at t~%.4g\n", *r.saturation.predicted_crossing);
  }
  if (r.saturation.saturation_time) {
    std::printf("saturation detected at t=%.6g\n", *r.saturation.saturation_time);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral BDF3 solver for the no-slope-selection thin-film equation"};
  app.require_subcommand(1);
  Flags f;

  auto* ct = app.add_subcommand("converge-time", "temporal convergence study");
  add_common(ct, f);
  ct->add_option("--nt-list", f.nt_list, "time-step counts, e.g. 100:100:1000");
  ct->add_option("--forcing", f.forcing, "manufactured forcing: discrete|analytic");

  auto* cs = app.add_subcommand("converge-space", "spatial convergence study");
  add_common(cs, f);
  cs->add_option("--dt", f.dt, "fixed time step");
  cs->add_option("--N-list", f.n_list, "grid sizes, e.g. 64:8:144");
  cs->add_option("--forcing", f.forcing, "manufactured forcing: discrete|analytic");

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--dt-schedule", f.dt_schedule, "stages t1:dt1,t2:dt2,...");
    cmd->add_option("--snapshot-at", f.snapshot_at, "snapshot times t1,t2,...");
    cmd->add_option("--diag-every", f.diag_every, "diagnostics cadence per stage, e.g. 10,10,25");
    cmd->add_option("--fit-window", f.fit_window, "fit window tmin,tmax");
    cmd->add_option("--checkpoint-every", f.checkpoint_every, "write checkpoint.bin every K steps");
    cmd->add_option("--stop-after-steps", f.stop_after, "stop (and checkpoint) after K steps");
    cmd->add_flag("--export-text", f.export_text, "also write snapshots as text matrices");
  };
  auto* co = app.add_subcommand("coarsen", "long-time coarsening run");
  add_common(co, f);
  add_run_flags(co);
  co->add_option("--init", f.init, "initial data: random|smooth|zero");

  auto* re = app.add_subcommand("resume", "continue a run from a checkpoint");
  add_common(re, f);
  add_run_flags(re);
  re->add_option("--checkpoint", f.checkpoint, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::fprintf(stderr, "error: code=usage message=\"%s\"\n", e.what());
    return code;
  }

  try {
    if (ct->parsed()) {
      const auto c = resolve(Mode::converge_time, f, ExperimentConfig::defaults(Mode::converge_time));
      const auto r = converge_time(c);
      print_convergence(r, true);
      write_outputs(c, r);
    } else if (cs->parsed()) {
      const auto c =
          resolve(Mode::converge_space, f, ExperimentConfig::defaults(Mode::converge_space));
      const auto r = converge_space(c);
      print_convergence(r, false);
      write_outputs(c, r);
    } else if (co->parsed()) {
      const auto c = resolve(Mode::coarsen, f, ExperimentConfig::defaults(Mode::coarsen));
      print_coarsen(coarsen(c));
    } else if (re->parsed()) {
      // The checkpoint's directory holds the config of the original run.
      const std::filesystem::path ckpt(f.checkpoint);
      auto base = ExperimentConfig::defaults(Mode::resume);
      const auto saved = ckpt.parent_path() / "config.json";
      if (f.config.empty() && std::filesystem::exists(saved)) {
        std::ifstream in(saved);
        nlohmann::json j;
        in >> j;
        base = apply_json(base, j);
        base.stop_after_steps.reset();
      }
      if (f.out.empty() && base.out_dir.empty()) base.out_dir = ckpt.parent_path().string();
      const auto c = resolve(Mode::resume, f, base);
      const bool restart = !f.dt_schedule.empty();
      print_coarsen(resume(ckpt, c, restart));
    }
  } catch (const NssError& e) {
    std::fprintf(stderr, "error: code=%s message=\"%s\"\n", e.code().c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: code=internal message=\"%s\"\n", e.what());
    return 1;
  }
  return 0;
}
