#include <algorithm>
#include <cmath>

#include "castfv/error.hpp"
#include "castfv/solidify.hpp"

namespace castfv {

EnergyResult energy_step(const SolidifyContext& ctx, const SimulationState& state, double dt) {
  const Mesh& mesh = *ctx.mesh;
  const MaterialModel& mat = ctx.mat;
  const SolidifyOptions& opt = ctx.opt;
  const int n = mesh.num_cells();

  const Eigen::VectorXd capacity = Eigen::VectorXd::Constant(n, mat.rho * mat.cp);
  Eigen::VectorXd gamma(n);
  for (int c = 0; c < n; ++c) gamma[c] = mat.k(state.T[c]);
  const TransportCoefficients coeffs = transport_coefficients(mesh, gamma);
  const SparseMatrix base = transport_matrix(mesh, coeffs, capacity, ctx.thermal_bc, dt);

  TransportRhsInput in;
  in.phi_n = &state.T;
  Eigen::VectorXd conv_n, conv_nm1;
  if (!state.flux.empty()) {
    conv_n = convection_balance(mesh, state.flux, state.T, capacity, ctx.thermal_bc);
    in.conv_n = &conv_n;
    if (state.step > 0 && !state.flux_old.empty()) {
      conv_nm1 = convection_balance(mesh, state.flux_old, state.T_old, capacity, ctx.thermal_bc);
      in.conv_nm1 = &conv_nm1;
    }
  }
  const Eigen::VectorXd rhs0 = transport_rhs(mesh, ctx.stencils, coeffs, capacity, ctx.thermal_bc, dt, in);

  const double latent_scale = mat.rho * mat.latent / dt;
  const double T_lo = mat.T_sol - mat.T_eps;
  const double below_liquidus = std::nextafter(mat.T_liq, -INFINITY);
  Eigen::VectorXd slope(n), T_star(n);
  auto linearize = [&](const Eigen::VectorXd& T, const Eigen::VectorXd& f) {
    for (int c = 0; c < n; ++c) {
      if (opt.latent_update == LatentUpdate::Relaxed || (f[c] <= 0.0 && T[c] >= mat.T_liq) ||
          (f[c] >= 1.0 && T[c] < T_lo)) {
        T_star[c] = T[c];
        slope[c] = solid_fraction(T[c], mat).dfs_dT;
      } else {
        T_star[c] = solid_fraction_temperature(f[c], mat);
        slope[c] = solid_fraction(std::min(T_star[c], below_liquidus), mat).dfs_dT;
      }
    }
  };

  Eigen::VectorXd T_m = state.T;
  Eigen::VectorXd f_m = state.fs;
  linearize(T_m, f_m);

  EnergyResult out;
  for (int it = 1; it <= opt.max_outer; ++it) {
    SparseMatrix A = base;
    Eigen::VectorXd b = rhs0;
    for (int c = 0; c < n; ++c) {
      const double vol = mesh.cell_volume[c];
      A.coeffRef(c, c) -= latent_scale * vol * slope[c];
      b[c] += latent_scale * vol * (f_m[c] - state.fs[c] - slope[c] * T_star[c]);
    }
    Eigen::VectorXd T_next = T_m;
    solve_auto(A, b, T_next, opt.linear);

    Eigen::VectorXd f_lin(n), f_next(n);
    for (int c = 0; c < n; ++c) {
      f_lin[c] = std::clamp(f_m[c] + slope[c] * (T_next[c] - T_star[c]), 0.0, 1.0);
      if (opt.latent_update == LatentUpdate::Relaxed)
        f_next[c] = (1.0 - opt.omega) * f_m[c] + opt.omega * solid_fraction(T_next[c], mat).fs;
      else
        f_next[c] = (1.0 - opt.omega) * f_m[c] + opt.omega * f_lin[c];
    }

    const double t_scale = T_next.cwiseAbs().maxCoeff();
    const double dT = (T_next - T_m).cwiseAbs().maxCoeff() / (t_scale > 0.0 ? t_scale : 1.0);
    const double df = (f_next - f_m).cwiseAbs().maxCoeff();
    const Eigen::VectorXd slope_m = slope;
    const Eigen::VectorXd offset_m = f_m - slope.cwiseProduct(T_star);
    linearize(T_next, f_next);
    const bool same_system = slope == slope_m && f_next - slope.cwiseProduct(T_star) == offset_m;
    if ((dT < opt.energy_tol && df < opt.energy_tol) || same_system) {
      out.T = std::move(T_next);
      out.fs = std::move(f_lin);
      out.iterations = it;
      out.converged = true;
      return out;
    }
    T_m = std::move(T_next);
    f_m = std::move(f_next);
  }
  throw NumericalError("energy outer loop did not converge in " + std::to_string(opt.max_outer) + " iterations");
}

double thermal_energy(const Mesh& mesh, const MaterialModel& mat, const Eigen::VectorXd& T, const Eigen::VectorXd& fs) {
  double e = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c)
    e += mat.rho * mesh.cell_volume[c] * (mat.cp * T[c] - mat.latent * fs[c]);
  return e;
}

}  // namespace castfv
