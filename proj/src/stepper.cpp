#include "nss/stepper.hpp"

#include <cmath>
#include <string>

#include "nss/kernels.hpp"

namespace nss {

void HistoryWindow::validate() const {
  require_same_grid(u_n.grid(), u_nm1.grid());
  require_same_grid(u_n.grid(), u_nm2.grid());
  if (!u_n.all_finite() || !u_nm1.all_finite() || !u_nm2.all_finite()) {
    throw NssError("non-finite", "history window holds non-finite values");
  }
}

double stage_start(const SchemeConfig& config, int index) {
  return index == 0 ? config.start_time : config.dt_schedule.at(index - 1).t_end;
}

std::int64_t stage_steps(const SchemeConfig& config, int index) {
  const auto& stage = config.dt_schedule.at(index);
  const double span = stage.t_end - stage_start(config, index);
  const double ratio = span / stage.dt;
  const auto steps = static_cast<std::int64_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-6) {
    throw NssError("invalid-schedule", "stage " + std::to_string(index) +
                                           " length is not a whole number of steps of dt=" +
                                           std::to_string(stage.dt));
  }
  return steps;
}

void SchemeConfig::validate() const {
  params.validate();
  if (!(params.length == grid.length)) {
    throw NssError("invalid-config", "model L and grid L disagree");
  }
  if (dt_schedule.empty()) throw NssError("invalid-schedule", "dt schedule is empty");
  double previous = start_time;
  for (std::size_t s = 0; s < dt_schedule.size(); ++s) {
    const auto& stage = dt_schedule[s];
    if (!(stage.dt > 0.0)) throw NssError("invalid-schedule", "every stage needs dt > 0");
    if (!(stage.t_end > previous)) {
      throw NssError("invalid-schedule", "stage end times must be strictly increasing");
    }
    stage_steps(*this, static_cast<int>(s));
    previous = stage.t_end;
  }
}

ImplicitSymbol::ImplicitSymbol(const SpectralGrid& ops, const ModelParams& params, double dt)
    : grid_(ops.grid()), dt_(dt) {
  if (!(dt > 0.0)) throw NssError("invalid-dt", "time step must be positive");
  const double coeff = params.epsilon * params.epsilon * dt + params.A * dt * dt * dt;
  const auto& lambda = ops.eigenvalues();
  denom_.resize(lambda.size());
  for (std::size_t q = 0; q < lambda.size(); ++q) {
    denom_[q] = 11.0 / 6.0 + coeff * lambda[q] * lambda[q];
  }
}

Spectrum2D ImplicitSymbol::solve(const Spectrum2D& rhs) const {
  require_same_grid(grid_, rhs.grid());
  Spectrum2D out(grid_);
  for (std::size_t q = 0; q < out.size(); ++q) out[q] = rhs[q] / denom_[q];
  return out;
}

Spectrum2D ImplicitSymbol::apply(const Spectrum2D& s) const {
  require_same_grid(grid_, s.grid());
  Spectrum2D out(grid_);
  for (std::size_t q = 0; q < out.size(); ++q) out[q] = s[q] * denom_[q];
  return out;
}

void check_blow_up(const RealField2D& u, double t) {
  if (!u.all_finite() || norm_inf(u) > 1e6) {
    throw NssError("blow-up", "solution blew up at t=" + std::to_string(t) +
                                  " (non-finite or |u|_inf > 1e6)");
  }
}

Bdf3Stepper::Bdf3Stepper(const SpectralGrid& ops, const SchemeConfig& config,
                         HistoryWindow window, double dt)
    : ops_(&ops),
      config_(&config),
      window_(std::move(window)),
      dt_(dt),
      symbol_(ops, config.params, dt) {
  window_.validate();
  require_same_grid(ops.grid(), window_.grid());
  reset(std::move(window_));
}

Bdf3Stepper::Level Bdf3Stepper::make_level(const RealField2D& u) const {
  Level level{ops_->forward(u), {}};
  level.nonlinear_hat = nonlinear_divergence_spectrum(*ops_, level.u_hat, config_->dealias);
  return level;
}

void Bdf3Stepper::reset(HistoryWindow window) {
  window_ = std::move(window);
  window_.validate();
  levels_[0] = make_level(window_.u_n);
  levels_[1] = make_level(window_.u_nm1);
  levels_[2] = make_level(window_.u_nm2);
}

void Bdf3Stepper::advance() {
  const double t_next = window_.time + dt_;
  const double dt = dt_;
  const double eps2_dt = config_->params.epsilon * config_->params.epsilon * dt;
  const auto& lambda = ops_->eigenvalues();
  const auto& [u0, n0] = levels_[0];
  const auto& [u1, n1] = levels_[1];
  const auto& [u2, n2] = levels_[2];

  // Solved for the increment u^{n+1} - u^n: the A dt^3 terms cancel on the
  // right, and constant history gives an exactly zero update.
  Spectrum2D rhs(ops_->grid());
  for (std::size_t q = 0; q < rhs.size(); ++q) {
    const double lam2 = lambda[q] * lambda[q];
    rhs[q] = 7.0 / 6.0 * (u0[q] - u1[q]) - (u1[q] - u2[q]) / 3.0 -
             dt * (3.0 * n0[q] - 3.0 * n1[q] + n2[q]) - eps2_dt * lam2 * u0[q];
  }
  if (config_->forcing) {
    const auto f_hat = ops_->forward(config_->forcing(*ops_, t_next));
    for (std::size_t q = 0; q < rhs.size(); ++q) rhs[q] += dt * f_hat[q];
  }
  // The increment is small next to the levels it is formed from, so roundoff
  // asymmetry inherited from them is projected out before the real inverse.
  auto delta = symbol_.solve(rhs);
  enforce_hermitian(delta);
  auto u_next = ops_->inverse(delta);
  kernels::axpy(1.0, window_.u_n, u_next);
  check_blow_up(u_next, t_next);

  levels_[2] = std::move(levels_[1]);
  levels_[1] = std::move(levels_[0]);
  levels_[0] = make_level(u_next);

  window_.u_nm2 = std::move(window_.u_nm1);
  window_.u_nm1 = std::move(window_.u_n);
  window_.u_n = std::move(u_next);
  window_.time = t_next;
  ++window_.step_index;
}

HistoryWindow step(const HistoryWindow& window, const SchemeConfig& config, double dt) {
  const SpectralGrid ops(window.grid());
  Bdf3Stepper stepper(ops, config, window, dt);
  stepper.advance();
  return stepper.window();
}

std::int64_t rk3_substeps(const SpectralGrid& ops, const ModelParams& params, double dt) {
  const double lmax = ops.max_eigenvalue();
  const double eps2 = params.epsilon * params.epsilon;
  const double stiffness = std::max(eps2 * lmax * lmax, lmax);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(dt * stiffness)));
}

RealField2D rk3_integrate(const SpectralGrid& ops, const RealField2D& u, double t0, double dt,
                          const SchemeConfig& config) {
  const auto substeps = rk3_substeps(ops, config.params, dt);
  if (substeps > config.max_rk3_substeps) {
    throw NssError("rk3-substeps", "explicit start needs " + std::to_string(substeps) +
                                       " substeps (cap " +
                                       std::to_string(config.max_rk3_substeps) +
                                       "); reduce dt or use the trivial starter");
  }
  const double h = dt / static_cast<double>(substeps);
  const double eps2 = config.params.epsilon * config.params.epsilon;
  const auto& lambda = ops.eigenvalues();

  // Semi-discrete right-hand side -div beta(grad u) - eps^2 Lap^2 u + f(t), in Fourier space.
  auto rhs = [&](const Spectrum2D& v, double t) {
    auto r = nonlinear_divergence_spectrum(ops, v, config.dealias);
    for (std::size_t q = 0; q < r.size(); ++q) {
      r[q] = -r[q] - eps2 * lambda[q] * lambda[q] * v[q];
    }
    if (config.forcing) {
      const auto f = ops.forward(config.forcing(ops, t));
      for (std::size_t q = 0; q < r.size(); ++q) r[q] += f[q];
    }
    return r;
  };

  auto v = ops.forward(u);
  Spectrum2D stage(ops.grid());
  for (std::int64_t s = 0; s < substeps; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    const auto k1 = rhs(v, t);
    for (std::size_t q = 0; q < v.size(); ++q) stage[q] = v[q] + h * k1[q];
    const auto k2 = rhs(stage, t + h);
    for (std::size_t q = 0; q < v.size(); ++q) {
      stage[q] = 0.75 * v[q] + 0.25 * (stage[q] + h * k2[q]);
    }
    const auto k3 = rhs(stage, t + 0.5 * h);
    for (std::size_t q = 0; q < v.size(); ++q) {
      v[q] = v[q] / 3.0 + 2.0 / 3.0 * (stage[q] + h * k3[q]);
    }
  }
  auto out = ops.inverse(v);
  check_blow_up(out, t0 + dt);
  return out;
}

HistoryWindow init_history(const SpectralGrid& ops, const RealField2D& u0,
                           const SchemeConfig& config, double dt, double t0,
                           std::int64_t step_index) {
  if (!u0.all_finite()) throw NssError("non-finite", "initial field holds non-finite values");
  if (config.init_strategy == StarterKind::trivial_copy) {
    return HistoryWindow{u0, u0, u0, t0, step_index};
  }
  auto u1 = rk3_integrate(ops, u0, t0, dt, config);
  auto u2 = rk3_integrate(ops, u1, t0 + dt, dt, config);
  return HistoryWindow{std::move(u2), std::move(u1), u0, t0 + 2.0 * dt, step_index + 2};
}

HistoryWindow init_history(const RealField2D& u0, const SchemeConfig& config, double dt) {
  const SpectralGrid ops(u0.grid());
  return init_history(ops, u0, config, dt, config.start_time);
}

namespace {

bool forcing_has_mean(const SchemeConfig& config, const SpectralGrid& ops) {
  if (!config.forcing) return false;
  const double t = config.start_time;
  const auto f = config.forcing(ops, t);
  return std::abs(mean(f)) > 1e-14 * (norm_inf(f) + 1.0);
}

}  // namespace

RunState run(const SchemeConfig& config, const RealField2D& u0, const RunCallbacks& callbacks) {
  config.validate();
  require_same_grid(config.grid, u0.grid());
  const SpectralGrid ops(config.grid);
  const double dt = config.dt_schedule.front().dt;
  RunState state;
  state.window = init_history(ops, u0, config, dt, config.start_time);
  if (config.init_strategy == StarterKind::rk3) {
    if (stage_steps(config, 0) < 2) {
      throw NssError("invalid-schedule", "the RK3 starter needs at least two steps in stage 0");
    }
    state.step_in_stage = 2;
  }
  if (callbacks.on_step) {
    callbacks.on_step(StepInfo{state.window, 0, state.step_in_stage, dt, 0.0,
                               !forcing_has_mean(config, ops)});
  }
  return continue_run(config, std::move(state), callbacks);
}

RunState continue_run(const SchemeConfig& config, RunState state, const RunCallbacks& callbacks) {
  config.validate();
  require_same_grid(config.grid, state.window.grid());
  const SpectralGrid ops(config.grid);
  const bool monitored = !forcing_has_mean(config, ops);
  const double mass0 = mean(state.window.u_n);
  const int stages = static_cast<int>(config.dt_schedule.size());
  std::int64_t taken = 0;

  while (state.stage_index < stages) {
    const int s = state.stage_index;
    const double dt = config.dt_schedule[s].dt;
    const auto total = stage_steps(config, s);
    if (state.restart) {
      const auto& u = state.window.u_n;
      state.window = HistoryWindow{u, u, u, state.window.time, state.window.step_index};
      state.restart = false;
    }
    Bdf3Stepper stepper(ops, config, state.window, dt);
    while (state.step_in_stage < total) {
      if (callbacks.max_steps && taken >= *callbacks.max_steps) {
        state.window = stepper.window();
        return state;
      }
      stepper.advance();
      ++state.step_in_stage;
      ++taken;
      if (callbacks.on_step) {
        const auto& w = stepper.window();
        const double drift = monitored ? mean(w.u_n) - mass0 : 0.0;
        callbacks.on_step(StepInfo{w, s, state.step_in_stage, dt, drift, monitored});
      }
    }
    state.window = stepper.window();
    // Pin the stage end time exactly instead of accumulating dt.
    state.window.time = config.dt_schedule[s].t_end;
    ++state.stage_index;
    state.step_in_stage = 0;
    state.restart = true;
  }
  state.restart = false;
  return state;
}

}  // namespace nss
