#include <doctest.h>

#include <set>

#include "castfv/error.hpp"
#include "castfv/mesh.hpp"
#include "helpers.hpp"

using namespace castfv;
using castfv::testing::scratch_dir;
using castfv::testing::write_file;

namespace {

const char* kHeader = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";

std::string unit_cube_msh() {
  return std::string(kHeader) +
         "$Nodes\n8\n1 0 0 0\n2 1 0 0\n3 1 1 0\n4 0 1 0\n5 0 0 1\n6 1 0 1\n7 1 1 1\n8 0 1 1\n$EndNodes\n"
         "$Elements\n1\n1 5 2 1 1 1 2 3 4 5 6 7 8\n$EndElements\n";
}

std::string two_hex_msh() {
  return std::string(kHeader) +
         "$Nodes\n12\n"
         "1 0 0 0\n2 1 0 0\n3 2 0 0\n4 0 1 0\n5 1 1 0\n6 2 1 0\n"
         "7 0 0 1\n8 1 0 1\n9 2 0 1\n10 0 1 1\n11 1 1 1\n12 2 1 1\n$EndNodes\n"
         "$Elements\n2\n1 5 2 1 1 1 2 5 4 7 8 11 10\n2 5 2 1 1 2 3 6 5 8 9 12 11\n$EndElements\n";
}

std::string one_tet_msh() {
  return std::string(kHeader) +
         "$PhysicalNames\n2\n2 1 \"skin\"\n3 2 \"body\"\n$EndPhysicalNames\n"
         "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
         "$Elements\n2\n1 4 2 2 1 1 2 3 4\n2 2 2 1 1 1 2 4\n$EndElements\n";
}

std::string two_tet_msh() {
  return std::string(kHeader) +
         "$Nodes\n5\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n5 1 1 1\n$EndNodes\n"
         "$Elements\n2\n1 4 2 1 1 1 2 3 4\n2 4 2 1 1 2 3 4 5\n$EndElements\n";
}

int count_boundary(const Mesh& m) {
  int n = 0;
  for (const Face& f : m.faces) n += f.is_boundary();
  return n;
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("unit cube file gives one cell with six boundary faces") {
  const auto dir = scratch_dir();
  const Mesh m = read_mesh(write_file(dir / "cube.msh", unit_cube_msh()));
  CHECK(m.num_cells() == 1);
  CHECK(m.num_faces() == 6);
  CHECK(count_boundary(m) == 6);
  CHECK(m.cell_volume[0] == doctest::Approx(1.0).epsilon(1e-14));
  for (int f = 0; f < 6; ++f) CHECK(m.face_area[f] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((m.cell_centroid[0] - Vec3(0.5, 0.5, 0.5)).norm() < 1e-14);
}

TEST_CASE("two hexes sharing a face") {
  const auto dir = scratch_dir();
  const Mesh m = read_mesh(write_file(dir / "two.msh", two_hex_msh()));
  CHECK(m.num_cells() == 2);
  CHECK(m.num_faces() - count_boundary(m) == 1);
  CHECK(count_boundary(m) == 10);
  CHECK(m.total_volume() == doctest::Approx(2.0));
}

TEST_CASE("triangles as the only elements are rejected") {
  const auto dir = scratch_dir();
  const std::string text = std::string(kHeader) +
                           "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n"
                           "$Elements\n1\n1 2 2 1 1 1 2 3\n$EndElements\n";
  CHECK_THROWS_AS(read_mesh(write_file(dir / "tri.msh", text)), MeshFormatError);
}

TEST_CASE("format errors carry the line number") {
  const auto dir = scratch_dir();
  const std::string text = std::string(kHeader) + "$Nodes\n2\n1 0 0 0\n2 1 zero 0\n$EndNodes\n";
  try {
    load_msh(write_file(dir / "bad.msh", text));
    FAIL("expected an exception");
  } catch (const MeshFormatError& e) {
    CHECK(e.line() == 7);
  }
  CHECK_THROWS_AS(load_msh((dir / "missing.msh").string()), MeshFormatError);
  const std::string binary = "$MeshFormat\n2.2 1 8\n$EndMeshFormat\n";
  CHECK_THROWS_AS(load_msh(write_file(dir / "bin.msh", binary)), MeshFormatError);
}

TEST_CASE("one tetrahedron splits into four hexes") {
  const auto dir = scratch_dir();
  const Mesh raw = load_msh(write_file(dir / "tet.msh", one_tet_msh()));
  CHECK(raw.tets.size() == 1);
  const Mesh m = read_mesh((dir / "tet.msh").string());
  CHECK(m.num_cells() == 4);
  CHECK(m.num_vertices() == 4 + 6 + 4 + 1);
  CHECK(m.total_volume() == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  const int skin = m.find_patch("skin");
  REQUIRE(skin >= 0);
  CHECK(m.patch_faces[skin].size() == 3);  // one triangle facet becomes three quads
  double area = 0.0;
  for (int f : m.patch_faces[skin]) area += m.face_area[f];
  CHECK(area == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("two tetrahedra sharing a face do not duplicate vertices") {
  const auto dir = scratch_dir();
  const Mesh m = read_mesh(write_file(dir / "tets.msh", two_tet_msh()));
  CHECK(m.num_cells() == 8);
  // 5 corners, 9 edges, 7 faces, 2 cells
  CHECK(m.num_vertices() == 5 + 9 + 7 + 2);
  for (int a = 0; a < m.num_vertices(); ++a)
    for (int b = a + 1; b < m.num_vertices(); ++b) CHECK((m.vertices[a] - m.vertices[b]).norm() > 1e-12);
  const double tet2 = std::abs((Vec3(1, 0, 0) - Vec3(1, 1, 1)).dot((Vec3(0, 1, 0) - Vec3(1, 1, 1))
                                                                      .cross(Vec3(0, 0, 1) - Vec3(1, 1, 1)))) /
                      6.0;
  CHECK(m.total_volume() == doctest::Approx(1.0 / 6.0 + tet2).epsilon(1e-12));
}

TEST_CASE("interior normals point from owner to neighbor") {
  const Mesh m = make_box_mesh(3, 2, 2, Vec3::Zero(), Vec3(3, 2, 2));
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.faces[f].is_boundary()) continue;
    CHECK(m.face_normal[f].dot(m.face_delta[f]) > 0.0);
    CHECK(m.face_ndotd[f] > 0.0);
  }
  for (int f = 0; f < m.num_faces(); ++f) {
    if (!m.faces[f].is_boundary()) continue;
    CHECK(m.face_normal[f].dot(m.face_centroid[f] - m.cell_centroid[m.faces[f].owner]) > 0.0);
  }
  CHECK(m.patch_names.size() == 6);
  CHECK(m.patch_faces[m.find_patch("xmin")].size() == 4);
}

TEST_CASE("sheared hex volume equals the triple product") {
  const Vec3 a(1.0, 0.0, 0.0), b(0.3, 1.2, 0.0), c(0.2, -0.4, 0.9);
  std::vector<Vec3> v = {Vec3::Zero(), a, a + b, b, c, a + c, a + b + c, b + c};
  const Mesh m = build_geometry(make_hex_mesh(v, {{0, 1, 2, 3, 4, 5, 6, 7}}));
  CHECK(m.cell_volume[0] == doctest::Approx(std::abs(a.dot(b.cross(c)))).epsilon(1e-12));
}

TEST_CASE("inverted cells are rejected") {
  std::vector<Vec3> v = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0),
                         Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(1, 1, 1), Vec3(0, 1, 1)};
  CHECK_THROWS_AS(build_geometry(make_hex_mesh(v, {{4, 5, 6, 7, 0, 1, 2, 3}})), MeshGeometryError);
}

TEST_CASE("vertex weights on a 2x2x2 block") {
  const Mesh m = make_box_mesh(2, 2, 2, Vec3::Zero(), Vec3(2, 2, 2));
  const VertexWeights w = vertex_weights(m);
  int centre = -1, corner = -1;
  for (int v = 0; v < m.num_vertices(); ++v) {
    if ((m.vertices[v] - Vec3(1, 1, 1)).norm() < 1e-12) centre = v;
    if (m.vertices[v].norm() < 1e-12) corner = v;
  }
  REQUIRE(centre >= 0);
  REQUIRE(corner >= 0);
  CHECK(w.offsets[centre + 1] - w.offsets[centre] == 8);
  for (int k = w.offsets[centre]; k < w.offsets[centre + 1]; ++k) CHECK(w.weights[k] == 0.125);
  CHECK(w.offsets[corner + 1] - w.offsets[corner] == 1);
  CHECK(w.weights[w.offsets[corner]] == 1.0);
  const Eigen::VectorXd five = Eigen::VectorXd::Constant(m.num_cells(), 5.0);
  for (int v = 0; v < m.num_vertices(); ++v) CHECK(w.interpolate(v, five) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("face neighbor sets include every cell touching the face") {
  const Mesh m = make_box_mesh(3, 3, 3, Vec3::Zero(), Vec3(3, 3, 3));
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.faces[f].is_boundary()) continue;
    std::set<int> expected;
    for (int v : m.faces[f].vertices)
      for (int c : m.vertex_cells[v]) expected.insert(c);
    CHECK(std::set<int>(m.face_neighbors[f].begin(), m.face_neighbors[f].end()) == expected);
  }
}

}  // TEST_SUITE
