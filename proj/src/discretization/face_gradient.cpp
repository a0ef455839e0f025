#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "castfv/discretization.hpp"
#include "castfv/error.hpp"

namespace castfv {

FaceGradientStencil face_gradient_stencil(const Mesh& mesh, const VertexWeights& weights, int face) {
  const Face& f = mesh.faces[face];
  const Vec3& c1 = mesh.cell_centroid[f.owner];
  const Vec3 c2 = f.is_boundary() ? mesh.face_centroid[face] : mesh.cell_centroid[f.neighbor];
  const Vec3 d = c2 - c1;
  const Vec3 e = mesh.vertices[f.vertices[2]] - mesh.vertices[f.vertices[0]];
  const Vec3 z = mesh.vertices[f.vertices[3]] - mesh.vertices[f.vertices[1]];

  Eigen::Matrix3d J;
  J.row(0) = d.transpose();
  J.row(1) = e.transpose();
  J.row(2) = z.transpose();
  const double scale = std::max({d.norm(), e.norm(), z.norm()});
  const double det = J.determinant();
  if (!(std::abs(det) >= 1e-14 * scale * scale * scale))
    throw NumericalError("singular face Jacobian at face " + std::to_string(face));
  const Eigen::Matrix3d Jinv = J.inverse();

  FaceGradientStencil s;
  s.face = face;
  s.cells = mesh.face_neighbors[face];
  s.coeffs = Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(s.cells.size()));
  s.condition = J.cwiseAbs().rowwise().sum().maxCoeff() * Jinv.cwiseAbs().rowwise().sum().maxCoeff();

  auto column = [&](int cell) {
    auto it = std::lower_bound(s.cells.begin(), s.cells.end(), cell);
    return static_cast<Eigen::Index>(it - s.cells.begin());
  };
  auto add_vertex = [&](int vertex, const Vec3& g) {
    for (int k = weights.offsets[vertex]; k < weights.offsets[vertex + 1]; ++k)
      s.coeffs.col(column(weights.cells[k])) += weights.weights[k] * g;
  };

  s.coeffs.col(column(f.owner)) -= Jinv.col(0);
  if (f.is_boundary())
    s.boundary_coeff = Jinv.col(0);
  else
    s.coeffs.col(column(f.neighbor)) += Jinv.col(0);
  add_vertex(f.vertices[2], Jinv.col(1));
  add_vertex(f.vertices[0], -Jinv.col(1));
  add_vertex(f.vertices[3], Jinv.col(2));
  add_vertex(f.vertices[1], -Jinv.col(2));
  return s;
}

std::vector<FaceGradientStencil> face_gradient_stencils(const Mesh& mesh, const VertexWeights& weights) {
  std::vector<FaceGradientStencil> out;
  out.reserve(mesh.faces.size());
  for (int f = 0; f < mesh.num_faces(); ++f) out.push_back(face_gradient_stencil(mesh, weights, f));
  return out;
}

Vec3 face_gradient(const Eigen::VectorXd& phi, int face, const Mesh& mesh, const VertexWeights& weights,
                   double boundary_value) {
  return face_gradient_stencil(mesh, weights, face).apply(phi, boundary_value);
}

DiffusionFaceCoeffs diffusion_face_coeffs(int face, double gamma, const Mesh& mesh,
                                          const FaceGradientStencil& stencil) {
  const double ndotd = mesh.face_ndotd[face];
  if (!(ndotd > 0.0)) throw MeshGeometryError("n.d <= 0 at face " + std::to_string(face));
  const double area = mesh.face_area[face];
  const Vec3 tangent = mesh.face_normal[face] - mesh.face_delta[face] / ndotd;

  DiffusionFaceCoeffs out;
  out.direct = gamma * area / ndotd;
  out.cells = stencil.cells;
  const Eigen::RowVector3d w = gamma * area * tangent.transpose();
  out.cross = (w * stencil.coeffs).transpose();
  out.cross_boundary = w * stencil.boundary_coeff;
  return out;
}

}  // namespace castfv
