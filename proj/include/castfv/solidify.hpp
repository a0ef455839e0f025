#pragma once

#include <array>
#include <unordered_map>
#include <vector>

#include "castfv/discretization.hpp"
#include "castfv/linsolve.hpp"
#include "castfv/material.hpp"
#include "castfv/mesh.hpp"
#include "castfv/microstructure.hpp"

namespace castfv {

enum class CellTag : unsigned char { LiquidMushy, Solid };

enum class FaceCase : unsigned char {
  Open,     // no solid cell in the gradient stencil
  Smeared,  // owners active, some stencil cell solid
  Blocked,  // at least one owner solid
  Wall,     // boundary face of an active cell
};

/// Active (liquid or mushy) cells, face classification and the repaired
/// gradient stencils of smeared faces.
struct ActiveSystemMap {
  std::vector<CellTag> tags;
  std::vector<int> active_cells;
  std::vector<int> row_of;  // -1 for solid cells
  std::vector<FaceCase> face_case;
  std::unordered_map<int, FaceGradientStencil> smeared;

  int num_active() const { return static_cast<int>(active_cells.size()); }
  bool is_solid(int cell) const { return tags[cell] == CellTag::Solid; }
  const FaceGradientStencil& stencil(int face, const std::vector<FaceGradientStencil>& base) const;
};

/// S when T < T_sol - T_eps, LM otherwise; faces sorted into the cases above.
ActiveSystemMap classify_cells(const Mesh& mesh, const Eigen::VectorXd& T, const MaterialModel& mat,
                               const std::vector<FaceGradientStencil>& stencils);

/// Drops the columns of solid cells and spreads their coefficients equally
/// over the remaining columns, per component.
FaceGradientStencil smear_gradient_stencil(const FaceGradientStencil& stencil, const std::vector<char>& solid);

/// Deletes rows and columns of solid cells and adds drag_diag (already
/// volume-integrated, indexed by full cell id) to the remaining diagonal.
LinearSystem reduce_momentum_system(const LinearSystem& full, const ActiveSystemMap& map,
                                    const Eigen::VectorXd& drag_diag);

/// How the outer energy iteration refreshes the solid fraction.
/// Curve: linearize about the point of the freezing curve matching f_s^m and
///   advance f_s by the linearized increment (robust when a cell crosses the
///   whole freezing range in one step).
/// Relaxed: linearize at T^m and set f_s = (1 - omega) f_s^m + omega f_s(T^{m+1}).
enum class LatentUpdate { Curve, Relaxed };

struct SolidifyOptions {
  bool convection = true;
  LatentUpdate latent_update = LatentUpdate::Curve;
  double omega = 1.0;
  double energy_tol = 1e-6;
  int max_outer = 100;
  double tol_div = 1e-8;
  SolverOptions linear{1e-10, 2000, 0.25, 25, 64};
  SolverOptions pressure{1e-13, 4000, 0.25, 25, 64};
};

using VelocityField = std::array<Eigen::VectorXd, 3>;

struct SimulationState {
  VelocityField u;
  VelocityField u_old;  // level n-1
  Eigen::VectorXd p;
  Eigen::VectorXd T;
  Eigen::VectorXd T_old;  // level n-1
  Eigen::VectorXd fs;
  std::vector<double> flux;      // face volume fluxes, m^3/s
  std::vector<double> flux_old;  // level n-1
  ActiveSystemMap map;
  double t = 0.0;
  int step = 0;

  std::vector<CoolingTracker> cooling;
  std::vector<GrainTracker> grains;
};

/// Mesh-dependent data shared by all steps of a run.
struct SolidifyContext {
  const Mesh* mesh = nullptr;
  VertexWeights weights;
  std::vector<FaceGradientStencil> stencils;
  MaterialModel mat;
  MicroParams micro;
  BoundaryConditions thermal_bc;
  BoundaryConditions velocity_bc;  // no-slip on every patch
  SolidifyOptions opt;

  // Momentum operator over all cells, rebuilt when dt changes.
  double momentum_dt = 0.0;
  TransportCoefficients momentum_coeffs;
  SparseMatrix momentum_matrix;
};

SolidifyContext make_context(const Mesh& mesh, const MaterialModel& mat, const BoundaryConditions& thermal_bc,
                             const SolidifyOptions& opt = {}, const MicroParams& micro = {});

SimulationState initial_state(const SolidifyContext& ctx, const Eigen::VectorXd& T0, double t0 = 0.0);

struct PredictorResult {
  VelocityField u_star;
  std::array<SolveReport, 3> reports;
};

PredictorResult predictor_step(SolidifyContext& ctx, const SimulationState& state, double dt);

struct PressureResult {
  Eigen::VectorXd p;     // full length, zero on solid cells
  LinearSystem system;   // reduced, over map.active_cells
  SolveReport report;
  Eigen::VectorXd kappa; // per-face pressure coefficient
};

/// Face coefficients 1/(rho/dt + drag), harmonic mean across faces.
Eigen::VectorXd correction_coefficients(const SolidifyContext& ctx, const SimulationState& state, double dt,
                                        Eigen::VectorXd* cell_beta = nullptr);

PressureResult pressure_step(const SolidifyContext& ctx, const SimulationState& state,
                             const VelocityField& u_star, double dt);

struct CorrectionResult {
  VelocityField u;
  std::vector<double> flux;
  double max_divergence_ratio = 0.0;  // max over active cells of |net| / (largest face flux or predicted flux)
};

CorrectionResult correct_velocity_and_flux(const SolidifyContext& ctx, const SimulationState& state,
                                           const VelocityField& u_star, const Eigen::VectorXd& p, double dt);

/// Net and gross face flux of every cell.
void flux_balance(const Mesh& mesh, const std::vector<double>& flux, Eigen::VectorXd& net, Eigen::VectorXd& gross);

struct EnergyResult {
  Eigen::VectorXd T;
  Eigen::VectorXd fs;
  int iterations = 0;
  bool converged = false;
};

/// Latent-heat outer loop on the energy equation. Fluxes in state.flux
/// are those of the new level.
EnergyResult energy_step(const SolidifyContext& ctx, const SimulationState& state, double dt);

struct StepReport {
  int energy_iterations = 0;
  int active_cells = 0;
  double flow_seconds = 0.0;  // wall time of classify + predictor + pressure + correction
  double max_divergence_ratio = 0.0;
  bool flow_solved = false;
  SolveReport pressure;
};

StepReport advance(SolidifyContext& ctx, SimulationState& state, double dt);

/// sum rho dV (C_p T - L_f f_s)
double thermal_energy(const Mesh& mesh, const MaterialModel& mat, const Eigen::VectorXd& T,
                      const Eigen::VectorXd& fs);

}  // namespace castfv
