#pragma once

#include <vector>

#include "castfv/mesh.hpp"

namespace castfv {

/// Piecewise-linear k(T), clamped outside the table.
struct ConductivityTable {
  std::vector<double> T;
  std::vector<double> k;

  static ConductivityTable constant(double value) { return {{0.0}, {value}}; }
  double operator()(double temperature) const;
};

struct MaterialModel {
  double rho = 2650.0;        // kg/m^3
  double mu = 1.3e-3;         // Pa s
  double cp = 1100.0;         // J/(kg K)
  ConductivityTable k = ConductivityTable::constant(150.0);  // W/(m K)
  double latent = 389000.0;   // J/kg
  double beta = 1.0e-4;       // 1/K
  double T_ref = 1000.0;      // K
  double k_p = 0.13;
  double T_f = 933.0;         // K
  double T_liq = 866.0;       // K
  double T_sol = 850.0;       // K
  double T_eps = 2.0;         // K
  double dendrite_spacing = 1.0e-5;  // m
  double D_s = 1.0e-9;        // m^2/s
  double C0 = 10.0;           // wt%
  Vec3 g = Vec3(0.0, 0.0, -9.81);

  /// Throws ConfigError unless T_sol + T_eps < T_liq < T_f, k_p < 1 and
  /// the scalar properties are positive.
  void validate() const;
};

struct SolidFraction {
  double fs = 0.0;
  double dfs_dT = 0.0;
};

/// Scheil solid fraction with the linear smear across [T_sol - T_eps, T_sol + T_eps].
SolidFraction solid_fraction(double T, const MaterialModel& mat);

/// Temperature on the freezing curve with solid fraction fs in [0, 1].
/// Returns T_liq at fs = 0 and T_sol - T_eps at fs = 1.
double solid_fraction_temperature(double fs, const MaterialModel& mat);

/// Blake-Kozeny permeability, m^2. Infinite at f_s = 0, zero at f_s = 1.
double permeability(double fs, double dendrite_spacing);

/// Drag coefficient mu/K in kg/(m^3 s), capped at drag_cap(rho, dt).
double darcy_drag(double fs, const MaterialModel& mat, double dt);
double drag_cap(double rho, double dt);

}  // namespace castfv
