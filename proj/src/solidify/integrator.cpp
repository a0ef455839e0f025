#include <chrono>

#include "castfv/error.hpp"
#include "castfv/solidify.hpp"

namespace castfv {

StepReport advance(SolidifyContext& ctx, SimulationState& state, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const Mesh& mesh = *ctx.mesh;
  const MaterialModel& mat = ctx.mat;
  StepReport report;

  const auto t0 = std::chrono::steady_clock::now();
  state.map = classify_cells(mesh, state.T, mat, ctx.stencils);
  report.active_cells = state.map.num_active();
  if (ctx.opt.convection && report.active_cells > 0) {
    PredictorResult pred = predictor_step(ctx, state, dt);
    PressureResult pres = pressure_step(ctx, state, pred.u_star, dt);
    CorrectionResult corr = correct_velocity_and_flux(ctx, state, pred.u_star, pres.p, dt);
    report.flow_solved = true;
    report.pressure = pres.report;
    report.max_divergence_ratio = corr.max_divergence_ratio;
    state.p = std::move(pres.p);
    state.u_old = std::move(state.u);
    state.u = std::move(corr.u);
    state.flux_old = std::move(state.flux);
    state.flux = std::move(corr.flux);
  } else {
    state.u_old = state.u;
    for (auto& comp : state.u) comp.setZero();
    state.p.setZero();
    state.flux_old = std::move(state.flux);
    state.flux.clear();
  }
  report.flow_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  EnergyResult energy = energy_step(ctx, state, dt);
  report.energy_iterations = energy.iterations;

  const double t1 = state.t + dt;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    state.cooling[c].record(state.t, t1, state.T[c], energy.T[c], mat.T_liq, mat.T_sol);
    state.grains[c].advance(state.t, t1, state.fs[c], energy.fs[c], ctx.micro);
  }
  state.T_old = std::move(state.T);
  state.T = std::move(energy.T);
  state.fs = std::move(energy.fs);
  state.t = t1;
  ++state.step;
  return report;
}

}  // namespace castfv
