#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "castfv/app.hpp"
#include "castfv/error.hpp"

namespace castfv {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void write_snapshot(const Mesh& mesh, const SimulationState& s, const std::string& path,
                    const MicrostructureFields* micro) {
  std::vector<NamedField> fields = {
      {"temperature", to_std(s.T)}, {"solid_fraction", to_std(s.fs)}, {"pressure", to_std(s.p)},
      {"u_x", to_std(s.u[0])},      {"u_y", to_std(s.u[1])},          {"u_z", to_std(s.u[2])},
  };
  std::vector<double> tag(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) tag[c] = s.map.tags.empty() ? 0.0 : (s.map.is_solid(c) ? 1.0 : 0.0);
  fields.push_back({"solid_tag", tag});
  if (micro) {
    fields.push_back({"cooling_rate", micro->cooling_rate});
    fields.push_back({"sdas", micro->sdas});
    fields.push_back({"yield_strength", micro->yield});
    fields.push_back({"grain_size", micro->grain_size});
  }
  write_vtk(mesh, fields, path);
}

std::string snapshot_name(const std::string& dir, int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fields_%06d.vtk", step);
  return (std::filesystem::path(dir) / buf).string();
}

}  // namespace

RunResult run_deterministic(const RunConfig& config, const RunOptions& options) {
  config.validate();
  RunResult r;
  auto mesh = std::make_shared<Mesh>(load_run_mesh(config));
  r.mesh = mesh;
  SolidifyContext ctx = make_context(*mesh, config.mat, thermal_boundary_conditions(*mesh, config, 0.0, 0.0),
                                     config.solver, config.micro);
  r.state = initial_state(ctx, Eigen::VectorXd::Constant(mesh->num_cells(), config.initial_temperature), 0.0);
  SimulationState& s = r.state;
  r.probe_cells = locate_probes(*mesh, config.probes);
  if (!options.out_dir.empty()) std::filesystem::create_directories(options.out_dir);

  auto record = [&] {
    r.times.push_back(s.t);
    std::vector<double> row;
    for (int c : r.probe_cells) row.push_back(s.T[c]);
    r.probe_traces.push_back(std::move(row));
    r.max_temperature.push_back(s.T.maxCoeff());
  };
  record();
  if (!options.out_dir.empty() && config.output_every > 0) write_snapshot(*mesh, s, snapshot_name(options.out_dir, 0), nullptr);

  const double eps = 1e-9 * config.dt;
  while (s.t < config.end_time - eps) {
    const double dt = std::min(config.dt, config.end_time - s.t);
    ctx.thermal_bc = thermal_boundary_conditions(*mesh, config, s.t + dt, s.t);
    try {
      r.steps.push_back(advance(ctx, s, dt));
    } catch (const NumericalError& e) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "step %d (t = %.6g s): ", s.step + 1, s.t + dt);
      throw NumericalError(buf + std::string(e.what()));
    }
    record();
    if (options.verbose && s.step % 50 == 0)
      std::fprintf(stderr, "step %d t=%.4g s  max T=%.2f K  active=%d  energy its=%d\n", s.step, s.t, s.T.maxCoeff(),
                   r.steps.back().active_cells, r.steps.back().energy_iterations);
    if (!options.out_dir.empty() && config.output_every > 0 && s.step % config.output_every == 0)
      write_snapshot(*mesh, s, snapshot_name(options.out_dir, s.step), nullptr);
    if (!r.fully_solid && s.fs.minCoeff() >= 1.0) {
      r.fully_solid = true;
      r.solidification_time = s.t;
      if (config.stop_at_solid) break;
    }
  }

  r.micro = microstructure_fields(s.cooling, s.grains, config.mat.T_liq, config.mat.T_sol, config.micro);
  if (!options.out_dir.empty()) {
    const std::filesystem::path dir(options.out_dir);
    write_snapshot(*mesh, s, (dir / "final.vtk").string(), &r.micro);
    std::vector<std::string> names;
    for (const auto& p : config.probes) names.push_back(p.name);
    if (!names.empty()) write_probes((dir / "probes.csv").string(), names, r.times, r.probe_traces);
    std::ofstream os(dir / "summary.txt");
    char buf[64];
    auto line = [&](const char* key, double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << key << " " << (std::isfinite(v) ? buf : "undefined") << "\n";
    };
    os << "steps " << s.step << "\n";
    line("end_time", s.t);
    line("solidification_time", r.solidification_time);
    line("max_sdas", finite_max(r.micro.sdas));
    line("min_yield_strength", finite_min(r.micro.yield));
    line("max_grain_size", finite_max(r.micro.grain_size));
  }
  return r;
}

double output_functional(const RunResult& r, const std::string& name) {
  if (name == "solidification_time") return r.solidification_time;
  if (name == "max_sdas") return finite_max(r.micro.sdas);
  if (name == "min_yield_strength") return finite_min(r.micro.yield);
  if (name == "max_grain_size") return finite_max(r.micro.grain_size);
  const std::string prefix = "max_temperature@";
  if (name.rfind(prefix, 0) == 0) {
    const double t = std::stod(name.substr(prefix.size()));
    if (r.times.empty() || t < r.times.front() || t > r.times.back() + 1e-9 * std::max(1.0, t))
      throw ConfigError("output " + name + " lies outside the simulated interval");
    auto it = std::lower_bound(r.times.begin(), r.times.end(), t);
    if (it == r.times.end()) return r.max_temperature.back();
    const std::size_t i = static_cast<std::size_t>(it - r.times.begin());
    if (i == 0 || *it == t) return r.max_temperature[i];
    const double w = (t - r.times[i - 1]) / (r.times[i] - r.times[i - 1]);
    return (1.0 - w) * r.max_temperature[i - 1] + w * r.max_temperature[i];
  }
  throw ConfigError("unknown output '" + name + "'");
}

}  // namespace castfv
