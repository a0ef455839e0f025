#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace castfv {

using Vec3 = Eigen::Vector3d;

/// Marker for the missing neighbor of a boundary face.
inline constexpr int kNoCell = -1;

/// Local hexahedron faces in GMSH/VTK node ordering, wound so that the
/// right-hand normal points out of a positively oriented cell.
inline constexpr std::array<std::array<int, 4>, 6> kHexFaces{{
    {0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
    {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7},
}};

struct Face {
  std::array<int, 4> vertices{};  // counter-clockwise seen from outside the owner
  int owner = kNoCell;
  int neighbor = kNoCell;         // kNoCell on the boundary
  int patch = -1;                 // boundary patch index, -1 for interior faces

  bool is_boundary() const { return neighbor == kNoCell; }
};

/// A boundary facet read from file before it is matched to a mesh face.
struct TaggedFacet {
  std::vector<int> vertices;  // 3 (triangle) or 4 (quad)
  int patch = -1;
};

/// Unstructured hexahedral mesh. Topology is filled by make_hex_mesh or
/// tets_to_hexes; geometric arrays are filled by build_geometry.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 8>> cells;

  // Tetrahedral input awaiting conversion (empty for hex meshes).
  std::vector<std::array<int, 4>> tets;
  std::vector<TaggedFacet> pending_facets;

  std::vector<Face> faces;
  std::vector<std::array<int, 6>> cell_faces;
  std::vector<std::string> patch_names;
  std::vector<std::vector<int>> patch_faces;

  std::vector<std::vector<int>> vertex_cells;
  std::vector<std::vector<int>> face_neighbors;  // every cell touching a face vertex, sorted

  std::vector<double> face_area;
  std::vector<Vec3> face_normal;    // unit, outward from owner
  std::vector<Vec3> face_centroid;
  std::vector<Vec3> face_delta;     // owner centroid to neighbor centroid (or to face centroid)
  std::vector<double> face_ndotd;   // n . d
  std::vector<Vec3> cell_centroid;
  std::vector<double> cell_volume;

  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }
  bool has_geometry() const { return cell_volume.size() == cells.size() && !cells.empty(); }

  int find_patch(const std::string& name) const;
  double total_volume() const;
};

/// Builds faces, adjacency and patches from hex connectivity. Facets carry
/// patch indices into patch_names; boundary faces not covered by any facet
/// land in a patch named "boundary".
Mesh make_hex_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 8>> cells,
                   const std::vector<TaggedFacet>& facets = {},
                   std::vector<std::string> patch_names = {});

/// Reads a GMSH 2.2 ASCII file. Hex input comes back with topology built;
/// tet input comes back with `tets` and `pending_facets` set for tets_to_hexes.
Mesh load_msh(const std::string& path);

/// Splits every tetrahedron into four hexahedra (edge midpoints, face
/// centroids, cell centroid). Shared midpoints are created once.
Mesh tets_to_hexes(const Mesh& mesh);

/// Computes areas, normals, centroids, volumes and the owner-to-neighbor
/// vectors. Throws on degenerate faces and inverted or non-convex cells.
Mesh build_geometry(Mesh mesh);

/// load_msh, conversion when needed, then build_geometry.
Mesh read_mesh(const std::string& path);

/// Structured nx*ny*nz box split into hexes with patches
/// xmin, xmax, ymin, ymax, zmin, zmax. Geometry is built.
Mesh make_box_mesh(int nx, int ny, int nz, const Vec3& lo, const Vec3& hi);

/// Equal-weight cell-to-vertex averaging stencils stored row-compressed.
struct VertexWeights {
  std::vector<int> offsets;  // size num_vertices + 1
  std::vector<int> cells;
  std::vector<double> weights;

  template <typename Field>
  double interpolate(int vertex, const Field& cell_values) const {
    double value = 0.0;
    for (int k = offsets[vertex]; k < offsets[vertex + 1]; ++k)
      value += weights[k] * cell_values[cells[k]];
    return value;
  }
};

VertexWeights vertex_weights(const Mesh& mesh);

}  // namespace castfv
