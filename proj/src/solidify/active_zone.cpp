#include "castfv/error.hpp"
#include "castfv/solidify.hpp"

namespace castfv {

const FaceGradientStencil& ActiveSystemMap::stencil(int face, const std::vector<FaceGradientStencil>& base) const {
  auto it = smeared.find(face);
  return it == smeared.end() ? base[face] : it->second;
}

FaceGradientStencil smear_gradient_stencil(const FaceGradientStencil& stencil, const std::vector<char>& solid) {
  int remaining = 0;
  Vec3 moved = Vec3::Zero();
  for (std::size_t k = 0; k < stencil.cells.size(); ++k) {
    if (solid[stencil.cells[k]])
      moved += stencil.coeffs.col(k);
    else
      ++remaining;
  }
  if (remaining == static_cast<int>(stencil.cells.size())) return stencil;
  if (remaining == 0)
    throw NumericalError("smear_gradient_stencil: every stencil cell of face " + std::to_string(stencil.face) +
                         " is solid");
  FaceGradientStencil out;
  out.face = stencil.face;
  out.boundary_coeff = stencil.boundary_coeff;
  out.condition = stencil.condition;
  out.coeffs.resize(3, remaining);
  const Vec3 share = moved / remaining;
  for (std::size_t k = 0; k < stencil.cells.size(); ++k) {
    if (solid[stencil.cells[k]]) continue;
    out.coeffs.col(static_cast<Eigen::Index>(out.cells.size())) = stencil.coeffs.col(k) + share;
    out.cells.push_back(stencil.cells[k]);
  }
  return out;
}

ActiveSystemMap classify_cells(const Mesh& mesh, const Eigen::VectorXd& T, const MaterialModel& mat,
                               const std::vector<FaceGradientStencil>& stencils) {
  const int n = mesh.num_cells();
  ActiveSystemMap map;
  map.tags.resize(n);
  map.row_of.assign(n, -1);
  std::vector<char> solid(n, 0);
  const double threshold = mat.T_sol - mat.T_eps;
  for (int c = 0; c < n; ++c) {
    if (T[c] < threshold) {
      map.tags[c] = CellTag::Solid;
      solid[c] = 1;
    } else {
      map.tags[c] = CellTag::LiquidMushy;
      map.row_of[c] = static_cast<int>(map.active_cells.size());
      map.active_cells.push_back(c);
    }
  }

  map.face_case.resize(mesh.faces.size());
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.faces[fi];
    if (solid[f.owner] || (!f.is_boundary() && solid[f.neighbor])) {
      map.face_case[fi] = FaceCase::Blocked;
      continue;
    }
    if (f.is_boundary()) {
      map.face_case[fi] = FaceCase::Wall;
      continue;
    }
    bool any_solid = false;
    for (int c : stencils[fi].cells)
      if (solid[c]) {
        any_solid = true;
        break;
      }
    if (!any_solid) {
      map.face_case[fi] = FaceCase::Open;
      continue;
    }
    map.face_case[fi] = FaceCase::Smeared;
    map.smeared.emplace(fi, smear_gradient_stencil(stencils[fi], solid));
  }
  return map;
}

LinearSystem reduce_momentum_system(const LinearSystem& full, const ActiveSystemMap& map,
                                    const Eigen::VectorXd& drag_diag) {
  const int m = map.num_active();
  LinearSystem out;
  out.b.resize(m);
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(full.A.nonZeros()));
  for (int r = 0; r < m; ++r) {
    const int c = map.active_cells[r];
    out.b[r] = full.b[c];
    for (SparseMatrix::InnerIterator it(full.A, c); it; ++it) {
      const int col = map.row_of[it.col()];
      if (col < 0) continue;
      trip.emplace_back(r, col, it.value());
    }
    if (drag_diag.size()) trip.emplace_back(r, r, drag_diag[c]);
  }
  out.A.resize(m, m);
  out.A.setFromTriplets(trip.begin(), trip.end());
  out.A.makeCompressed();
  return out;
}

}  // namespace castfv
