#include "castfv/discretization.hpp"
#include "castfv/error.hpp"

namespace castfv {

BoundaryConditions zero_gradient_everywhere(const Mesh& mesh) {
  return BoundaryConditions(mesh.patch_names.size());
}

double boundary_value(const Mesh& mesh, const BoundaryConditions& bc, int face, const Eigen::VectorXd& phi,
                      bool old_level) {
  const Face& f = mesh.faces[face];
  const BoundaryCondition& c = bc.at(f.patch);
  if (c.kind == BoundaryKind::FixedValue) return old_level ? c.old() : c.value;
  return phi[f.owner];
}

double convection_face_flux(int face, double volume_flux, const Eigen::VectorXd& phi, const Mesh& mesh,
                            double boundary_phi) {
  const Face& f = mesh.faces[face];
  if (f.is_boundary()) return volume_flux * boundary_phi;
  return volume_flux * 0.5 * (phi[f.owner] + phi[f.neighbor]);
}

Eigen::VectorXd convection_balance(const Mesh& mesh, const std::vector<double>& face_flux,
                                   const Eigen::VectorXd& phi, const Eigen::VectorXd& capacity,
                                   const BoundaryConditions& bc) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.num_cells());
  if (face_flux.empty()) return out;
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const double F = face_flux[fi];
    if (F == 0.0) continue;
    const Face& f = mesh.faces[fi];
    if (f.is_boundary()) {
      out[f.owner] += capacity[f.owner] * convection_face_flux(fi, F, phi, mesh, boundary_value(mesh, bc, fi, phi));
    } else {
      const double flux = 0.5 * (capacity[f.owner] + capacity[f.neighbor]) * convection_face_flux(fi, F, phi, mesh);
      out[f.owner] += flux;
      out[f.neighbor] -= flux;
    }
  }
  return out;
}

TransportCoefficients transport_coefficients(const Mesh& mesh, const Eigen::VectorXd& gamma) {
  TransportCoefficients c;
  c.direct.resize(mesh.faces.size());
  c.cross_vector.resize(mesh.faces.size());
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.faces[fi];
    const double ndotd = mesh.face_ndotd[fi];
    if (!(ndotd > 0.0)) throw MeshGeometryError("n.d <= 0 at face " + std::to_string(fi));
    const double g = f.is_boundary() ? gamma[f.owner] : 0.5 * (gamma[f.owner] + gamma[f.neighbor]);
    c.direct[fi] = g * mesh.face_area[fi] / ndotd;
    c.cross_vector[fi] = g * mesh.face_area[fi] * (mesh.face_normal[fi] - mesh.face_delta[fi] / ndotd);
  }
  return c;
}

Eigen::VectorXd cross_diffusion(const Mesh& mesh, const std::vector<FaceGradientStencil>& stencils,
                                const TransportCoefficients& coeffs, const Eigen::VectorXd& phi,
                                const BoundaryConditions& bc, bool old_level) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.num_cells());
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Vec3& w = coeffs.cross_vector[fi];
    if (w.squaredNorm() == 0.0) continue;
    const Face& f = mesh.faces[fi];
    if (f.is_boundary()) {
      if (bc.at(f.patch).kind != BoundaryKind::FixedValue) continue;
      out[f.owner] += w.dot(stencils[fi].apply(phi, boundary_value(mesh, bc, fi, phi, old_level)));
    } else {
      const double flux = w.dot(stencils[fi].apply(phi));
      out[f.owner] += flux;
      out[f.neighbor] -= flux;
    }
  }
  return out;
}

SparseMatrix transport_matrix(const Mesh& mesh, const TransportCoefficients& coeffs,
                              const Eigen::VectorXd& capacity, const BoundaryConditions& bc, double dt,
                              const Eigen::VectorXd* diag_extra) {
  if (!(dt > 0.0)) throw NumericalError("time step must be positive");
  const int n = mesh.num_cells();
  std::vector<Triplet> trip;
  trip.reserve(n + 4 * mesh.faces.size());
  for (int c = 0; c < n; ++c) {
    double d = capacity[c] * mesh.cell_volume[c] / dt;
    if (diag_extra) d += (*diag_extra)[c];
    trip.emplace_back(c, c, d);
  }
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.faces[fi];
    const double a = 0.5 * coeffs.direct[fi];
    if (f.is_boundary()) {
      if (bc.at(f.patch).kind == BoundaryKind::FixedValue) trip.emplace_back(f.owner, f.owner, a);
      continue;
    }
    trip.emplace_back(f.owner, f.owner, a);
    trip.emplace_back(f.owner, f.neighbor, -a);
    trip.emplace_back(f.neighbor, f.neighbor, a);
    trip.emplace_back(f.neighbor, f.owner, -a);
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

Eigen::VectorXd transport_rhs(const Mesh& mesh, const std::vector<FaceGradientStencil>& stencils,
                              const TransportCoefficients& coeffs, const Eigen::VectorXd& capacity,
                              const BoundaryConditions& bc, double dt, const TransportRhsInput& in) {
  if (!(dt > 0.0)) throw NumericalError("time step must be positive");
  if (!in.phi_n) throw NumericalError("transport_rhs needs the level-n field");
  const Eigen::VectorXd& phi = *in.phi_n;
  const int n = mesh.num_cells();
  Eigen::VectorXd b(n);
  for (int c = 0; c < n; ++c) b[c] = capacity[c] * mesh.cell_volume[c] / dt * phi[c];

  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.faces[fi];
    const double a = 0.5 * coeffs.direct[fi];
    if (f.is_boundary()) {
      const BoundaryCondition& c = bc.at(f.patch);
      if (c.kind == BoundaryKind::FixedValue) b[f.owner] += a * c.value + a * (c.old() - phi[f.owner]);
      continue;
    }
    const double flux = a * (phi[f.neighbor] - phi[f.owner]);
    b[f.owner] += flux;
    b[f.neighbor] -= flux;
  }
  b += cross_diffusion(mesh, stencils, coeffs, phi, bc, true);
  if (in.conv_n) {
    if (in.conv_nm1)
      b -= 1.5 * (*in.conv_n) - 0.5 * (*in.conv_nm1);
    else
      b -= *in.conv_n;
  }
  if (in.source) b += *in.source;
  return b;
}

LinearSystem assemble_transport(const Mesh& mesh, const std::vector<FaceGradientStencil>& stencils,
                                const TransportProblem& p) {
  const int n = mesh.num_cells();
  if (p.capacity.size() != n || p.gamma.size() != n || p.phi_n.size() != n)
    throw NumericalError("assemble_transport: field sizes do not match the mesh");
  TransportCoefficients coeffs = transport_coefficients(mesh, p.gamma);
  LinearSystem sys;
  sys.A = transport_matrix(mesh, coeffs, p.capacity, p.bc, p.dt, p.diag_extra.size() ? &p.diag_extra : nullptr);

  Eigen::VectorXd conv_n, conv_nm1;
  TransportRhsInput in;
  in.phi_n = &p.phi_n;
  if (!p.flux_n.empty()) {
    conv_n = convection_balance(mesh, p.flux_n, p.phi_n, p.capacity, p.bc);
    in.conv_n = &conv_n;
    if (!p.flux_nm1.empty() && p.phi_nm1.size() == n) {
      conv_nm1 = convection_balance(mesh, p.flux_nm1, p.phi_nm1, p.capacity, p.bc);
      in.conv_nm1 = &conv_nm1;
    }
  }
  if (p.source.size()) in.source = &p.source;
  sys.b = transport_rhs(mesh, stencils, coeffs, p.capacity, p.bc, p.dt, in);
  return sys;
}

}  // namespace castfv
