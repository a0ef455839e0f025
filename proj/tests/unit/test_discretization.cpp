#include <doctest.h>

#include <cmath>

#include "castfv/discretization.hpp"

using namespace castfv;

namespace {

// nx*ny*nz block on [0,1]^3 with x shifted by shear * z.
Mesh sheared_block(int nx, int ny, int nz, double shear) {
  std::vector<Vec3> v;
  auto id = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        const double x = double(i) / nx, y = double(j) / ny, z = double(k) / nz;
        v.emplace_back(x + shear * z, y, z);
      }
  std::vector<std::array<int, 8>> cells;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        cells.push_back({id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k), id(i, j + 1, k), id(i, j, k + 1),
                         id(i + 1, j, k + 1), id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)});
  return build_geometry(make_hex_mesh(v, cells));
}

Eigen::VectorXd sample(const Mesh& m, double (*f)(const Vec3&)) {
  Eigen::VectorXd phi(m.num_cells());
  for (int c = 0; c < m.num_cells(); ++c) phi[c] = f(m.cell_centroid[c]);
  return phi;
}

int face_at_x(const Mesh& m, double x) {
  for (int f = 0; f < m.num_faces(); ++f)
    if (!m.faces[f].is_boundary() && std::abs(m.face_centroid[f].x() - x) < 1e-12 &&
        std::abs(m.face_normal[f].x()) > 0.5)
      return f;
  return -1;
}

double x_gradient_error(int n, double (*field)(const Vec3&), double exact) {
  const Mesh m = make_box_mesh(n, 1, 1, Vec3::Zero(), Vec3(1.0, 1.0 / n, 1.0 / n));
  const VertexWeights w = vertex_weights(m);
  const int f = face_at_x(m, 0.5);
  return std::abs(face_gradient(sample(m, field), f, m, w).x() - exact);
}

}  // namespace

TEST_SUITE("discretization") {

TEST_CASE("face gradient of a constant field vanishes") {
  const Mesh m = sheared_block(3, 3, 3, 0.3);
  const VertexWeights w = vertex_weights(m);
  const Eigen::VectorXd phi = Eigen::VectorXd::Constant(m.num_cells(), 7.0);
  for (int f = 0; f < m.num_faces(); ++f) {
    const double bv = 7.0;
    CHECK(face_gradient(phi, f, m, w, bv).norm() < 1e-10);
  }
}

TEST_CASE("face gradient is exact for linear fields on interior faces") {
  const Mesh m = make_box_mesh(4, 4, 4, Vec3::Zero(), Vec3(1, 1, 1));
  const VertexWeights w = vertex_weights(m);
  const Eigen::VectorXd phi = sample(m, [](const Vec3& p) { return 2 * p.x() + 3 * p.y() - p.z(); });
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.faces[f].is_boundary()) continue;
    // Vertices touching the boundary average fewer cells, so only fully interior faces are exact.
    bool interior = true;
    for (int v : m.faces[f].vertices) interior = interior && m.vertex_cells[v].size() == 8;
    if (!interior) continue;
    CHECK((face_gradient(phi, f, m, w) - Vec3(2, 3, -1)).norm() < 1e-12);
  }
}

TEST_CASE("x^2 gradient at a mid face is exact and x^3 converges at second order") {
  auto square = [](const Vec3& p) { return p.x() * p.x(); };
  CHECK(x_gradient_error(8, square, 1.0) < 1e-12);
  CHECK(x_gradient_error(16, square, 1.0) < 1e-12);
  auto cube = [](const Vec3& p) { return p.x() * p.x() * p.x(); };
  const double e1 = x_gradient_error(8, cube, 0.75), e2 = x_gradient_error(16, cube, 0.75);
  CHECK(e1 > 0.0);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("orthogonal faces have no cross diffusion") {
  const double h = 0.25;
  const Mesh m = make_box_mesh(4, 4, 4, Vec3::Zero(), Vec3(1, 1, 1));
  const VertexWeights w = vertex_weights(m);
  const auto st = face_gradient_stencils(m, w);
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.faces[f].is_boundary()) continue;
    const DiffusionFaceCoeffs d = diffusion_face_coeffs(f, 2.0, m, st[f]);
    CHECK(d.direct == doctest::Approx(2.0 * h * h / h));
    CHECK(d.cross.cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("skewed faces have cross diffusion that annihilates constants") {
  const Mesh m = sheared_block(3, 3, 3, 0.4);
  const VertexWeights w = vertex_weights(m);
  const auto st = face_gradient_stencils(m, w);
  bool found = false;
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.faces[f].is_boundary()) continue;
    const DiffusionFaceCoeffs d = diffusion_face_coeffs(f, 1.5, m, st[f]);
    CHECK(std::abs(d.cross.sum()) < 1e-12 * (1.0 + d.cross.cwiseAbs().sum()));
    if (d.cross.cwiseAbs().maxCoeff() > 1e-6) found = true;
    const DiffusionFaceCoeffs zero = diffusion_face_coeffs(f, 0.0, m, st[f]);
    CHECK(zero.direct == 0.0);
    CHECK(zero.cross.cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(found);
}

TEST_CASE("convective face flux is the mean value times the volume flux") {
  const Mesh m = make_box_mesh(2, 1, 1, Vec3::Zero(), Vec3(2, 1, 1));
  const int f = face_at_x(m, 1.0);
  REQUIRE(f >= 0);
  Eigen::VectorXd phi(2);
  phi[m.faces[f].owner] = 1.0;
  phi[m.faces[f].neighbor] = 3.0;
  CHECK(convection_face_flux(f, 2.0, phi, m) == doctest::Approx(4.0));
  CHECK(convection_face_flux(f, 0.0, phi, m) == 0.0);
}

TEST_CASE("uniform field in a divergence-free flow has zero net convection") {
  const Mesh m = sheared_block(3, 3, 3, 0.2);
  const Vec3 u(0.3, -0.2, 0.7);
  std::vector<double> flux(m.num_faces());
  for (int f = 0; f < m.num_faces(); ++f) flux[f] = m.face_area[f] * m.face_normal[f].dot(u);
  const Eigen::VectorXd phi = Eigen::VectorXd::Constant(m.num_cells(), 4.0);
  const Eigen::VectorXd cap = Eigen::VectorXd::Constant(m.num_cells(), 2.0);
  const Eigen::VectorXd net = convection_balance(m, flux, phi, cap, zero_gradient_everywhere(m));
  CHECK(net.cwiseAbs().maxCoeff() < 1e-13);
  const std::vector<double> none(m.num_faces(), 0.0);
  CHECK(convection_balance(m, none, phi, cap, zero_gradient_everywhere(m)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("three-cell slab with fixed ends reaches the linear steady state") {
  const Mesh m = make_box_mesh(3, 1, 1, Vec3::Zero(), Vec3(1, 1.0 / 3, 1.0 / 3));
  const VertexWeights w = vertex_weights(m);
  const auto st = face_gradient_stencils(m, w);
  TransportProblem p;
  p.capacity = Eigen::VectorXd::Ones(3);
  p.gamma = Eigen::VectorXd::Ones(3);
  p.bc = zero_gradient_everywhere(m);
  p.bc[m.find_patch("xmin")] = {BoundaryKind::FixedValue, 0.0};
  p.bc[m.find_patch("xmax")] = {BoundaryKind::FixedValue, 1.0};
  p.dt = 0.05;
  p.phi_n = Eigen::VectorXd::Zero(3);
  for (int step = 0; step < 400; ++step) {
    const LinearSystem sys = assemble_transport(m, st, p);
    Eigen::VectorXd x = p.phi_n;
    solve_auto(sys.A, sys.b, x);
    p.phi_n = x;
  }
  int middle = -1;
  for (int c = 0; c < 3; ++c)
    if (std::abs(m.cell_centroid[c].x() - 0.5) < 1e-12) middle = c;
  REQUIRE(middle >= 0);
  CHECK(p.phi_n[middle] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("uniform field without sources stays unchanged") {
  const Mesh m = sheared_block(3, 2, 2, 0.3);
  const VertexWeights w = vertex_weights(m);
  const auto st = face_gradient_stencils(m, w);
  TransportProblem p;
  p.capacity = Eigen::VectorXd::Constant(m.num_cells(), 3.0);
  p.gamma = Eigen::VectorXd::Constant(m.num_cells(), 0.7);
  p.bc = zero_gradient_everywhere(m);
  p.dt = 0.1;
  p.phi_n = Eigen::VectorXd::Constant(m.num_cells(), 2.5);
  for (int step = 0; step < 5; ++step) {
    const LinearSystem sys = assemble_transport(m, st, p);
    Eigen::VectorXd x = p.phi_n;
    solve_auto(sys.A, sys.b, x);
    CHECK((x.array() - 2.5).abs().maxCoeff() < 1e-12);
    p.phi_n = x;
  }
}

}  // TEST_SUITE
