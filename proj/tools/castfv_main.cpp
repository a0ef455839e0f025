#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "castfv/app.hpp"
#include "castfv/error.hpp"

using namespace castfv;

namespace {

int mesh_info(const std::string& path) {
  const Mesh mesh = read_mesh(path);
  double vmin = INFINITY, vmax = 0.0, worst = 0.0;
  for (double v : mesh.cell_volume) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (mesh.faces[f].is_boundary()) continue;
    const double c = mesh.face_ndotd[f] / mesh.face_delta[f].norm();
    worst = std::max(worst, std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / M_PI);
  }
  std::printf("vertices     %d\ncells        %d\nfaces        %d\n", mesh.num_vertices(), mesh.num_cells(),
              mesh.num_faces());
  std::printf("volume       %.6g m^3\ncell volume  %.6g .. %.6g m^3\nnon-orthogonality  %.2f deg\n",
              mesh.total_volume(), vmin, vmax, worst);
  for (std::size_t p = 0; p < mesh.patch_names.size(); ++p)
    std::printf("patch %-12s %zu faces\n", mesh.patch_names[p].c_str(), mesh.patch_faces[p].size());
  return 0;
}

int run(const std::string& config_path, const std::string& out, bool no_convection) {
  RunConfig config = load_run_config(config_path);
  if (no_convection) config.solver.convection = false;
  RunOptions options;
  options.out_dir = out;
  options.verbose = true;
  const RunResult r = run_deterministic(config, options);
  std::printf("steps %d, t = %.6g s, fully solid: %s\n", r.state.step, r.state.t, r.fully_solid ? "yes" : "no");
  for (const char* name : {"solidification_time", "max_sdas", "min_yield_strength", "max_grain_size"}) {
    const double v = output_functional(r, name);
    if (std::isfinite(v))
      std::printf("%-20s %.6g\n", name, v);
    else
      std::printf("%-20s undefined\n", name);
  }
  return 0;
}

int campaign(const std::string& config_path, const std::string& out, int workers, int level, bool no_convection) {
  CampaignConfig config = load_campaign_config(config_path);
  if (level > 0) config.level = level;
  if (no_convection) set_field(config.base, "physics.convection", "off");
  CampaignOptions options;
  options.out_dir = out;
  options.workers = workers;
  options.verbose = true;
  const CampaignResult r = run_campaign(config, options);
  std::printf("%d sparse-grid nodes, %d validation points, %d runs evaluated (rest cached)\n", r.grid.size(),
              static_cast<int>(r.validation_samples.cols()), r.evaluated);
  for (std::size_t o = 0; o < r.outputs.size(); ++o) {
    std::printf("%s: mean %.6g, std %.6g\n", r.outputs[o].c_str(), r.models[o].mean(),
                std::sqrt(r.models[o].variance()));
    const SobolIndices& s = r.sobol[o];
    for (int k = 0; k < r.dist.dim(); ++k) {
      if (s.defined)
        std::printf("  %-16s first %.4f  total %.4f\n", r.dist.names[k].c_str(), s.first[k], s.total[k]);
      else
        std::printf("  %-16s undefined (zero variance)\n", r.dist.names[k].c_str());
    }
    if (r.validation_error.size()) std::printf("  validation RMS / max: %.3e\n", r.validation_error[o]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"castfv: finite-volume solidification with uncertainty quantification"};
  app.require_subcommand(1);
  std::string out = "castfv_out";
  int workers = 1, level = 0;
  bool no_convection = false;
  std::string config_path, mesh_path;

  auto* run_cmd = app.add_subcommand("run", "run one deterministic simulation");
  run_cmd->add_option("config", config_path, "run config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out, "output directory");
  run_cmd->add_flag("--no-convection", no_convection, "skip the flow solve");

  auto* campaign_cmd = app.add_subcommand("campaign", "sparse-grid UQ campaign");
  campaign_cmd->add_option("config", config_path, "campaign config file")->required()->check(CLI::ExistingFile);
  campaign_cmd->add_option("--out", out, "output directory (holds the sample cache)");
  campaign_cmd->add_option("--workers", workers, "parallel simulations")->check(CLI::PositiveNumber);
  campaign_cmd->add_option("--level", level, "sparse-grid level (overrides the config)")->check(CLI::PositiveNumber);
  campaign_cmd->add_flag("--no-convection", no_convection, "skip the flow solve");

  auto* mesh_cmd = app.add_subcommand("mesh-info", "summarize a GMSH mesh");
  mesh_cmd->add_option("msh", mesh_path, "mesh file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(config_path, out, no_convection);
    if (*campaign_cmd) return campaign(config_path, out, workers, level, no_convection);
    if (*mesh_cmd) return mesh_info(mesh_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
