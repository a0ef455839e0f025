#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "castfv/linsolve.hpp"
#include "castfv/mesh.hpp"

namespace castfv {

/// Face-centred gradient as a linear combination of cell values:
/// grad = sum_k coeffs.col(k) * phi[cells[k]] + boundary_coeff * phi_face.
/// boundary_coeff is nonzero only on boundary faces, where the face
/// centroid stands in for the missing neighbor centroid.
struct FaceGradientStencil {
  int face = -1;
  std::vector<int> cells;
  Eigen::Matrix3Xd coeffs;
  Vec3 boundary_coeff = Vec3::Zero();
  double condition = 0.0;

  template <typename Field>
  Vec3 apply(const Field& phi, double boundary_value = 0.0) const {
    Vec3 g = boundary_coeff * boundary_value;
    for (std::size_t k = 0; k < cells.size(); ++k) g += coeffs.col(k) * phi[cells[k]];
    return g;
  }
};

FaceGradientStencil face_gradient_stencil(const Mesh& mesh, const VertexWeights& weights, int face);
std::vector<FaceGradientStencil> face_gradient_stencils(const Mesh& mesh, const VertexWeights& weights);

/// Gradient at a face. Boundary faces take boundary_value at the face centroid.
Vec3 face_gradient(const Eigen::VectorXd& phi, int face, const Mesh& mesh, const VertexWeights& weights,
                   double boundary_value = 0.0);

/// Direct diffusion coefficient Gamma dA / (n.d) and the cross-diffusion
/// stencil Gamma dA (n - d/(n.d)) . grad(phi)_f written per stencil cell.
struct DiffusionFaceCoeffs {
  double direct = 0.0;
  std::vector<int> cells;
  Eigen::VectorXd cross;
  double cross_boundary = 0.0;
};

DiffusionFaceCoeffs diffusion_face_coeffs(int face, double gamma, const Mesh& mesh,
                                          const FaceGradientStencil& stencil);

enum class BoundaryKind { ZeroGradient, FixedValue };

struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::ZeroGradient;
  double value = 0.0;      // value at the new time level
  double value_old = std::numeric_limits<double>::quiet_NaN();  // NaN: same as value

  double old() const { return std::isnan(value_old) ? value : value_old; }
};

/// Indexed by patch.
using BoundaryConditions = std::vector<BoundaryCondition>;

BoundaryConditions zero_gradient_everywhere(const Mesh& mesh);

/// Boundary value seen by a boundary face for a field (owner value for zero gradient).
double boundary_value(const Mesh& mesh, const BoundaryConditions& bc, int face, const Eigen::VectorXd& phi,
                      bool old_level = false);

/// Flux carried through a face: volume_flux times the arithmetic mean of
/// the two cell values, or times the boundary value on boundary faces.
double convection_face_flux(int face, double volume_flux, const Eigen::VectorXd& phi, const Mesh& mesh,
                            double boundary_phi = 0.0);

/// Net convective outflow per cell, sum_f s_f F_f c_f phi_f, where c_f is
/// the mean capacity across the face.
Eigen::VectorXd convection_balance(const Mesh& mesh, const std::vector<double>& face_flux,
                                   const Eigen::VectorXd& phi, const Eigen::VectorXd& capacity,
                                   const BoundaryConditions& bc);

/// Per-face diffusion data for a cell-wise diffusivity field.
struct TransportCoefficients {
  std::vector<double> direct;        // Gamma_f dA / (n.d)
  std::vector<Vec3> cross_vector;    // Gamma_f dA (n - d/(n.d))
};

TransportCoefficients transport_coefficients(const Mesh& mesh, const Eigen::VectorXd& gamma);

/// Explicit cross-diffusion contribution per cell at the given field level.
Eigen::VectorXd cross_diffusion(const Mesh& mesh, const std::vector<FaceGradientStencil>& stencils,
                                const TransportCoefficients& coeffs, const Eigen::VectorXd& phi,
                                const BoundaryConditions& bc, bool old_level = true);

/// Implicit operator capacity dV/dt + diag_extra + half direct diffusion.
SparseMatrix transport_matrix(const Mesh& mesh, const TransportCoefficients& coeffs,
                              const Eigen::VectorXd& capacity, const BoundaryConditions& bc, double dt,
                              const Eigen::VectorXd* diag_extra = nullptr);

struct TransportRhsInput {
  const Eigen::VectorXd* phi_n = nullptr;
  const Eigen::VectorXd* conv_n = nullptr;    // convection_balance at level n
  const Eigen::VectorXd* conv_nm1 = nullptr;  // level n-1; nullptr on the first step
  const Eigen::VectorXd* source = nullptr;    // volume-integrated source per cell
};

/// Right-hand side: capacity dV/dt phi^n + half direct diffusion at n,
/// explicit cross diffusion, Adams-Bashforth convection, sources.
Eigen::VectorXd transport_rhs(const Mesh& mesh, const std::vector<FaceGradientStencil>& stencils,
                              const TransportCoefficients& coeffs, const Eigen::VectorXd& capacity,
                              const BoundaryConditions& bc, double dt, const TransportRhsInput& in);

struct TransportProblem {
  Eigen::VectorXd capacity;  // rho or rho*C_p per cell
  Eigen::VectorXd gamma;     // diffusivity per cell
  BoundaryConditions bc;
  double dt = 0.0;
  Eigen::VectorXd phi_n;
  std::vector<double> flux_n;    // face volume fluxes at n (empty: no convection)
  std::vector<double> flux_nm1;  // at n-1 (empty on the first step)
  Eigen::VectorXd phi_nm1;
  Eigen::VectorXd source;        // optional, volume-integrated
  Eigen::VectorXd diag_extra;    // optional caller augmentation
};

LinearSystem assemble_transport(const Mesh& mesh, const std::vector<FaceGradientStencil>& stencils,
                                const TransportProblem& problem);

}  // namespace castfv
