#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "castfv/error.hpp"
#include "castfv/solidify.hpp"

namespace castfv {

SolidifyContext make_context(const Mesh& mesh, const MaterialModel& mat, const BoundaryConditions& thermal_bc,
                             const SolidifyOptions& opt, const MicroParams& micro) {
  if (!mesh.has_geometry()) throw MeshGeometryError("mesh geometry has not been built");
  mat.validate();
  if (thermal_bc.size() != mesh.patch_names.size())
    throw ConfigError("thermal boundary conditions must cover every patch");
  SolidifyContext ctx;
  ctx.mesh = &mesh;
  ctx.weights = vertex_weights(mesh);
  ctx.stencils = face_gradient_stencils(mesh, ctx.weights);
  ctx.mat = mat;
  ctx.micro = micro;
  ctx.thermal_bc = thermal_bc;
  ctx.velocity_bc.assign(mesh.patch_names.size(), BoundaryCondition{BoundaryKind::FixedValue, 0.0});
  ctx.opt = opt;
  return ctx;
}

SimulationState initial_state(const SolidifyContext& ctx, const Eigen::VectorXd& T0, double t0) {
  const Mesh& mesh = *ctx.mesh;
  const int n = mesh.num_cells();
  if (T0.size() != n) throw ConfigError("initial temperature field has the wrong size");
  SimulationState s;
  for (int k = 0; k < 3; ++k) {
    s.u[k] = Eigen::VectorXd::Zero(n);
    s.u_old[k] = Eigen::VectorXd::Zero(n);
  }
  s.p = Eigen::VectorXd::Zero(n);
  s.T = T0;
  s.T_old = T0;
  s.fs.resize(n);
  for (int c = 0; c < n; ++c) s.fs[c] = solid_fraction(T0[c], ctx.mat).fs;
  s.t = t0;
  s.map = classify_cells(mesh, T0, ctx.mat, ctx.stencils);
  s.cooling.resize(n);
  s.grains.assign(n, GrainTracker(ctx.micro.r0));
  for (int c = 0; c < n; ++c) s.cooling[c].start(t0, T0[c], ctx.mat.T_liq, ctx.mat.T_sol);
  return s;
}

namespace {

void ensure_momentum_operator(SolidifyContext& ctx, double dt) {
  if (ctx.momentum_dt == dt && ctx.momentum_matrix.rows() == ctx.mesh->num_cells()) return;
  const int n = ctx.mesh->num_cells();
  ctx.momentum_coeffs = transport_coefficients(*ctx.mesh, Eigen::VectorXd::Constant(n, ctx.mat.mu));
  ctx.momentum_matrix = transport_matrix(*ctx.mesh, ctx.momentum_coeffs, Eigen::VectorXd::Constant(n, ctx.mat.rho),
                                         ctx.velocity_bc, dt);
  ctx.momentum_dt = dt;
}

}  // namespace

PredictorResult predictor_step(SolidifyContext& ctx, const SimulationState& state, double dt) {
  const Mesh& mesh = *ctx.mesh;
  const MaterialModel& mat = ctx.mat;
  const int n = mesh.num_cells();
  const ActiveSystemMap& map = state.map;
  PredictorResult out;
  for (int k = 0; k < 3; ++k) out.u_star[k] = Eigen::VectorXd::Zero(n);
  if (map.num_active() == 0) return out;

  ensure_momentum_operator(ctx, dt);
  const Eigen::VectorXd capacity = Eigen::VectorXd::Constant(n, mat.rho);
  Eigen::VectorXd drag(n);
  for (int c = 0; c < n; ++c) drag[c] = darcy_drag(state.fs[c], mat, dt) * mesh.cell_volume[c];

  const bool has_old = state.step > 0 && !state.flux_old.empty();
  LinearSystem full;
  full.A = ctx.momentum_matrix;
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd source(n);
    for (int c = 0; c < n; ++c)
      source[c] = -mat.g[k] * mat.rho * mat.beta * (state.T[c] - mat.T_ref) * mesh.cell_volume[c];
    Eigen::VectorXd conv_n, conv_nm1;
    TransportRhsInput in;
    in.phi_n = &state.u[k];
    in.source = &source;
    if (!state.flux.empty()) {
      conv_n = convection_balance(mesh, state.flux, state.u[k], capacity, ctx.velocity_bc);
      in.conv_n = &conv_n;
      if (has_old) {
        conv_nm1 = convection_balance(mesh, state.flux_old, state.u_old[k], capacity, ctx.velocity_bc);
        in.conv_nm1 = &conv_nm1;
      }
    }
    full.b = transport_rhs(mesh, ctx.stencils, ctx.momentum_coeffs, capacity, ctx.velocity_bc, dt, in);
    LinearSystem reduced = reduce_momentum_system(full, map, drag);
    Eigen::VectorXd x(map.num_active());
    for (int r = 0; r < map.num_active(); ++r) x[r] = state.u[k][map.active_cells[r]];
    out.reports[k] = solve_auto(reduced.A, reduced.b, x, ctx.opt.linear);
    for (int r = 0; r < map.num_active(); ++r) out.u_star[k][map.active_cells[r]] = x[r];
  }
  return out;
}

Eigen::VectorXd correction_coefficients(const SolidifyContext& ctx, const SimulationState& state, double dt,
                                        Eigen::VectorXd* cell_beta) {
  const Mesh& mesh = *ctx.mesh;
  const int n = mesh.num_cells();
  Eigen::VectorXd beta(n);
  for (int c = 0; c < n; ++c) beta[c] = 1.0 / (ctx.mat.rho / dt + darcy_drag(state.fs[c], ctx.mat, dt));
  Eigen::VectorXd kappa = Eigen::VectorXd::Zero(mesh.num_faces());
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.faces[fi];
    if (f.is_boundary()) continue;
    const double a = beta[f.owner], b = beta[f.neighbor];
    kappa[fi] = 2.0 * a * b / (a + b);
  }
  if (cell_beta) *cell_beta = std::move(beta);
  return kappa;
}

namespace {

// Face u* interpolated as kappa_f times the mean of u* / beta, so a face next to a
// high-drag cell carries a flux scaled like its pressure coefficient.
double face_predicted_flux(const Mesh& mesh, int fi, const VelocityField& u_star, const Eigen::VectorXd& kappa,
                           const Eigen::VectorXd& beta) {
  const Face& f = mesh.faces[fi];
  const double wo = 0.5 * kappa[fi] / beta[f.owner], wn = 0.5 * kappa[fi] / beta[f.neighbor];
  Vec3 u_f;
  for (int k = 0; k < 3; ++k) u_f[k] = wo * u_star[k][f.owner] + wn * u_star[k][f.neighbor];
  return mesh.face_area[fi] * mesh.face_normal[fi].dot(u_f);
}

bool carries_flux(FaceCase c) { return c == FaceCase::Open || c == FaceCase::Smeared; }

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

}  // namespace

PressureResult pressure_step(const SolidifyContext& ctx, const SimulationState& state,
                             const VelocityField& u_star, double dt) {
  const Mesh& mesh = *ctx.mesh;
  const ActiveSystemMap& map = state.map;
  const int m = map.num_active();
  PressureResult out;
  out.p = Eigen::VectorXd::Zero(mesh.num_cells());
  Eigen::VectorXd beta;
  out.kappa = correction_coefficients(ctx, state, dt, &beta);
  if (m == 0) return out;

  std::vector<Triplet> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);

  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    if (!carries_flux(map.face_case[fi])) continue;
    const Face& f = mesh.faces[fi];
    const int ro = map.row_of[f.owner], rn = map.row_of[f.neighbor];
    const double kappa = out.kappa[fi];
    const double area = mesh.face_area[fi];
    const double ndotd = mesh.face_ndotd[fi];
    const double direct = kappa * area / ndotd;
    const Vec3 tangent = kappa * area * (mesh.face_normal[fi] - mesh.face_delta[fi] / ndotd);
    const double s = face_predicted_flux(mesh, fi, u_star, out.kappa, beta);

    // Owner row holds -g_f, neighbor row +g_f, with g_f the pressure part of the flux.
    trip.emplace_back(ro, ro, direct);
    trip.emplace_back(ro, rn, -direct);
    trip.emplace_back(rn, rn, direct);
    trip.emplace_back(rn, ro, -direct);
    const FaceGradientStencil& st = map.stencil(fi, ctx.stencils);
    for (std::size_t k = 0; k < st.cells.size(); ++k) {
      const double w = tangent.dot(st.coeffs.col(static_cast<Eigen::Index>(k)));
      if (w == 0.0) continue;
      const int col = map.row_of[st.cells[k]];
      trip.emplace_back(ro, col, -w);
      trip.emplace_back(rn, col, w);
    }
    b[ro] -= s;
    b[rn] += s;
    parent[find_root(parent, ro)] = find_root(parent, rn);
  }

  // Pin the row with the largest diagonal in every connected component.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  for (const auto& t : trip)
    if (t.row() == t.col()) diag[t.row()] += t.value();
  std::vector<int> pin_of_root(m, -1);
  for (int r = 0; r < m; ++r) {
    int& pin = pin_of_root[find_root(parent, r)];
    if (pin < 0 || diag[r] > diag[pin]) pin = r;
  }
  std::vector<char> pinned(m, 0);
  for (int r = 0; r < m; ++r)
    if (pin_of_root[r] >= 0) pinned[pin_of_root[r]] = 1;
  std::vector<Triplet> kept;
  kept.reserve(trip.size() + m);
  for (const auto& t : trip)
    if (!pinned[t.row()]) kept.push_back(t);
  for (int r = 0; r < m; ++r)
    if (pinned[r]) {
      kept.emplace_back(r, r, diag[r] > 0.0 ? diag[r] : 1.0);
      b[r] = 0.0;
    }
  out.system.A.resize(m, m);
  out.system.A.setFromTriplets(kept.begin(), kept.end());
  out.system.A.makeCompressed();
  out.system.b = b;

  // Symmetric diagonal scaling: drag makes row magnitudes differ by many decades.
  Eigen::VectorXd scale(m);
  for (int r = 0; r < m; ++r) scale[r] = 1.0 / std::sqrt(std::abs(out.system.A.coeff(r, r)));
  SparseMatrix scaled = scale.asDiagonal() * out.system.A * scale.asDiagonal();
  const Eigen::VectorXd b_scaled = scale.cwiseProduct(out.system.b);
  Eigen::VectorXd y(m);
  for (int r = 0; r < m; ++r) y[r] = pinned[r] ? 0.0 : state.p[map.active_cells[r]] / scale[r];
  out.report = solve_auto(scaled, b_scaled, y, ctx.opt.pressure);
  for (int r = 0; r < m; ++r) out.p[map.active_cells[r]] = scale[r] * y[r];
  return out;
}

void flux_balance(const Mesh& mesh, const std::vector<double>& flux, Eigen::VectorXd& net, Eigen::VectorXd& gross) {
  net = Eigen::VectorXd::Zero(mesh.num_cells());
  gross = Eigen::VectorXd::Zero(mesh.num_cells());
  if (flux.empty()) return;
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.faces[fi];
    net[f.owner] += flux[fi];
    gross[f.owner] += std::abs(flux[fi]);
    if (!f.is_boundary()) {
      net[f.neighbor] -= flux[fi];
      gross[f.neighbor] += std::abs(flux[fi]);
    }
  }
}

CorrectionResult correct_velocity_and_flux(const SolidifyContext& ctx, const SimulationState& state,
                                           const VelocityField& u_star, const Eigen::VectorXd& p, double dt) {
  const Mesh& mesh = *ctx.mesh;
  const ActiveSystemMap& map = state.map;
  const int n = mesh.num_cells();
  CorrectionResult out;
  out.flux.assign(mesh.faces.size(), 0.0);
  for (int k = 0; k < 3; ++k) out.u[k] = Eigen::VectorXd::Zero(n);

  Eigen::VectorXd beta;
  const Eigen::VectorXd kappa = correction_coefficients(ctx, state, dt, &beta);
  std::vector<Vec3> grad_sum(n, Vec3::Zero());
  std::vector<int> grad_count(n, 0);
  Eigen::VectorXd local_max = Eigen::VectorXd::Zero(n);

  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    if (!carries_flux(map.face_case[fi])) continue;
    const Face& f = mesh.faces[fi];
    const double area = mesh.face_area[fi];
    const double ndotd = mesh.face_ndotd[fi];
    const Vec3 grad = map.stencil(fi, ctx.stencils).apply(p);
    const Vec3 tangent = mesh.face_normal[fi] - mesh.face_delta[fi] / ndotd;
    const double normal_grad = (p[f.neighbor] - p[f.owner]) / ndotd + tangent.dot(grad);
    const double predicted = face_predicted_flux(mesh, fi, u_star, kappa, beta);
    const double F = predicted - kappa[fi] * area * normal_grad;
    out.flux[fi] = F;
    // Scale of the flux and of the two terms cancelling in it.
    const double magnitude = std::max(std::abs(F), std::abs(predicted));
    for (int c : {f.owner, f.neighbor}) {
      grad_sum[c] += grad;
      ++grad_count[c];
      local_max[c] = std::max(local_max[c], magnitude);
    }
  }

  for (int c : map.active_cells) {
    const Vec3 g = grad_count[c] ? Vec3(grad_sum[c] / grad_count[c]) : Vec3::Zero();
    for (int k = 0; k < 3; ++k) out.u[k][c] = u_star[k][c] - beta[c] * g[k];
  }

  Eigen::VectorXd net, gross;
  flux_balance(mesh, out.flux, net, gross);
  const double global_max = local_max.size() ? local_max.maxCoeff() : 0.0;
  const double floor = 1e-12 * global_max + 1e-300;
  for (int c : map.active_cells) {
    const double ratio = std::abs(net[c]) / (local_max[c] + floor);
    out.max_divergence_ratio = std::max(out.max_divergence_ratio, ratio);
  }
  if (out.max_divergence_ratio > ctx.opt.tol_div)
  {
    char msg[128];
    std::snprintf(msg, sizeof msg, "continuity residual after correction is %.3e (tolerance %.3e)",
                  out.max_divergence_ratio, ctx.opt.tol_div);
    throw NumericalError(msg);
  }
  return out;
}

}  // namespace castfv
