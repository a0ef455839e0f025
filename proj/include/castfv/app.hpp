#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "castfv/mesh.hpp"
#include "castfv/microstructure.hpp"
#include "castfv/solidify.hpp"
#include "castfv/uq.hpp"

namespace castfv {

using ConfigTree = boost::property_tree::ptree;

/// Parses "<number> <unit>" for a quantity kind ("temperature", "time",
/// "length", ...) and returns the SI value. Dimensionless kinds take a bare
/// number.
double parse_quantity(const std::string& text, const std::string& kind);

/// SI unit string written back by the campaign when it overrides a value.
std::string si_unit(const std::string& kind);

/// Quantity kind of a config key such as "material.density" or
/// "boundary.xmin.temperature".
std::string key_kind(const std::string& field);

/// Flat sections of key = value lines; '#' and ';' start comments.
ConfigTree load_config_tree(const std::string& path);
ConfigTree parse_config_tree(const std::string& text);

/// Raw value of "section.key" (the last dot splits section from key).
std::string get_field(const ConfigTree& tree, const std::string& field);
bool has_field(const ConfigTree& tree, const std::string& field);
void set_field(ConfigTree& tree, const std::string& field, const std::string& value);
std::string dump_config_tree(const ConfigTree& tree);

struct BoundarySpec {
  enum class Type { Fixed, Cooling, Insulated };
  std::string patch;
  Type type = Type::Insulated;
  double temperature = 0.0;  // fixed value, or T_0 of the cooling ramp
  double rate = 0.0;         // K/s
  double offset = 0.0;       // K, added to the whole ramp

  /// T_0 + offset - rate t for cooling walls.
  double value(double t) const;
};

struct ProbeSpec {
  std::string name;
  Vec3 position = Vec3::Zero();
};

struct RunConfig {
  std::string mesh_path;
  std::array<int, 3> box_cells{0, 0, 0};
  Vec3 box_size = Vec3::Zero();

  MaterialModel mat;
  MicroParams micro;
  double initial_temperature = 0.0;
  std::vector<BoundarySpec> boundaries;
  bool gravity = true;
  SolidifyOptions solver;

  double dt = 0.0;
  double end_time = 0.0;
  bool stop_at_solid = true;
  int output_every = 0;  // steps between snapshots, 0 for final only
  std::vector<ProbeSpec> probes;

  bool uses_box() const { return box_cells[0] > 0; }
  void validate() const;
};

/// Relative mesh paths resolve against base_dir.
RunConfig parse_run_config(const ConfigTree& tree, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

Mesh load_run_mesh(const RunConfig& config);

/// One boundary condition per mesh patch at times t (new) and t_old.
BoundaryConditions thermal_boundary_conditions(const Mesh& mesh, const RunConfig& config, double t, double t_old);

struct RunResult {
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> times;                      // 0 and every step
  std::vector<std::vector<double>> probe_traces;  // [time][probe]
  std::vector<int> probe_cells;
  std::vector<double> max_temperature;            // per entry of times
  std::vector<StepReport> steps;
  SimulationState state;
  MicrostructureFields micro;
  bool fully_solid = false;
  double solidification_time = kNoValue;  // first time every cell reached f_s = 1
};

struct RunOptions {
  std::string out_dir;  // empty: no files
  bool verbose = false;
};

RunResult run_deterministic(const RunConfig& config, const RunOptions& options = {});

/// Evaluates "solidification_time", "max_sdas", "min_yield_strength",
/// "max_grain_size" or "max_temperature@<seconds>".
double output_functional(const RunResult& result, const std::string& name);

// Output writers.
using NamedField = std::pair<std::string, std::vector<double>>;

/// Legacy ASCII VTK unstructured grid; non-finite values are written as -1.
void write_vtk(const Mesh& mesh, const std::vector<NamedField>& fields, const std::string& path);

/// Nearest cell centroid; throws ConfigError outside the mesh bounding box.
std::vector<int> locate_probes(const Mesh& mesh, const std::vector<ProbeSpec>& probes);

void write_probes(const std::string& path, const std::vector<std::string>& names, const std::vector<double>& times,
                  const std::vector<std::vector<double>>& traces);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Campaign.
struct StochasticInput {
  std::string name;
  std::string field;  // "section.key" of the run config
  double mean = 0.0;  // SI
  double stddev = 0.0;
};

struct CampaignConfig {
  ConfigTree base;
  std::string base_dir = ".";
  std::vector<StochasticInput> inputs;
  int level = 3;
  int order = -1;  // -1: level - 1
  std::vector<std::string> outputs;
  int validation_points = 0;  // Latin-hypercube test runs
  std::uint64_t seed = 20240229;
  int surface_resolution = 21;

  InputDistribution distribution() const;
  void validate() const;
};

CampaignConfig parse_campaign_config(const ConfigTree& tree, const std::string& base_dir = ".");
CampaignConfig load_campaign_config(const std::string& path);

/// Run config with the stochastic inputs set to physical values x.
ConfigTree sample_config(const CampaignConfig& config, const Eigen::VectorXd& x);

/// Maps physical input values to one value per output. Used as a test hook
/// in place of the solver.
using SampleEvaluator = std::function<std::vector<double>(const Eigen::VectorXd& x)>;

SampleEvaluator solver_evaluator(const CampaignConfig& config);

struct CampaignOptions {
  int workers = 1;
  std::string out_dir;  // cache and reports; empty keeps everything in memory
  SampleEvaluator evaluator;  // empty: run the solver
  bool verbose = false;
};

struct CampaignResult {
  SparseGrid grid;
  InputDistribution dist;
  std::vector<std::string> outputs;
  Eigen::MatrixXd sample_outputs;  // M x outputs
  int evaluated = 0;               // samples computed in this call (rest from cache)
  std::vector<PceModel> models;
  std::vector<SobolIndices> sobol;
  std::vector<ResponseSurface> surfaces;
  Eigen::MatrixXd validation_samples;  // dim x validation_points, standardized
  Eigen::MatrixXd validation_outputs;
  Eigen::VectorXd validation_error;    // normalized RMS per output
};

CampaignResult run_campaign(const CampaignConfig& config, const CampaignOptions& options = {});

}  // namespace castfv
