#include "castfv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Geometry>

#include "castfv/error.hpp"

namespace castfv {

namespace {

using FaceKey = std::array<int, 4>;

FaceKey sorted_key(std::array<int, 4> v) {
  std::sort(v.begin(), v.end());
  return v;
}

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

// Five-tet split of a hex; the last tet is the central one.
constexpr std::array<std::array<int, 4>, 5> kHexTets{{
    {0, 1, 3, 4}, {1, 2, 3, 6}, {1, 4, 5, 6}, {3, 4, 6, 7}, {1, 3, 4, 6},
}};

}  // namespace

int Mesh::find_patch(const std::string& name) const {
  auto it = std::find(patch_names.begin(), patch_names.end(), name);
  return it == patch_names.end() ? -1 : static_cast<int>(it - patch_names.begin());
}

double Mesh::total_volume() const {
  return std::accumulate(cell_volume.begin(), cell_volume.end(), 0.0);
}

Mesh make_hex_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 8>> cells,
                   const std::vector<TaggedFacet>& facets, std::vector<std::string> patch_names) {
  Mesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);
  mesh.patch_names = std::move(patch_names);

  const int nv = mesh.num_vertices();
  for (const auto& cell : mesh.cells)
    for (int v : cell)
      if (v < 0 || v >= nv) throw MeshGeometryError("cell references vertex out of range");

  std::map<FaceKey, int> face_index;
  mesh.cell_faces.resize(mesh.cells.size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    for (int lf = 0; lf < 6; ++lf) {
      std::array<int, 4> fv;
      for (int k = 0; k < 4; ++k) fv[k] = cell[kHexFaces[lf][k]];
      auto key = sorted_key(fv);
      auto [it, inserted] = face_index.emplace(key, mesh.num_faces());
      if (inserted) {
        Face face;
        face.vertices = fv;
        face.owner = c;
        mesh.faces.push_back(face);
      } else {
        Face& face = mesh.faces[it->second];
        if (face.neighbor != kNoCell)
          throw MeshGeometryError("face shared by more than two cells (cell " +
                                  std::to_string(c) + ")");
        face.neighbor = c;
      }
      mesh.cell_faces[c][lf] = it->second;
    }
  }

  // Boundary patches from tagged quads.
  mesh.patch_faces.assign(mesh.patch_names.size(), {});
  for (const auto& facet : facets) {
    if (facet.vertices.size() != 4) continue;
    std::array<int, 4> fv{facet.vertices[0], facet.vertices[1], facet.vertices[2],
                          facet.vertices[3]};
    auto it = face_index.find(sorted_key(fv));
    if (it == face_index.end() || !mesh.faces[it->second].is_boundary()) continue;
    mesh.faces[it->second].patch = facet.patch;
  }
  int fallback = -1;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    Face& face = mesh.faces[f];
    if (!face.is_boundary()) continue;
    if (face.patch < 0) {
      if (fallback < 0) {
        fallback = mesh.find_patch("boundary");
        if (fallback < 0) {
          mesh.patch_names.push_back("boundary");
          mesh.patch_faces.emplace_back();
          fallback = static_cast<int>(mesh.patch_names.size()) - 1;
        }
      }
      face.patch = fallback;
    }
    mesh.patch_faces[face.patch].push_back(f);
  }

  mesh.vertex_cells.assign(mesh.vertices.size(), {});
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int v : mesh.cells[c]) {
      auto& list = mesh.vertex_cells[v];
      if (std::find(list.begin(), list.end(), c) == list.end()) list.push_back(c);
    }

  mesh.face_neighbors.resize(mesh.faces.size());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    std::vector<int> nb;
    for (int v : mesh.faces[f].vertices)
      nb.insert(nb.end(), mesh.vertex_cells[v].begin(), mesh.vertex_cells[v].end());
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    mesh.face_neighbors[f] = std::move(nb);
  }
  return mesh;
}

Mesh build_geometry(Mesh mesh) {
  if (!mesh.tets.empty() && mesh.cells.empty())
    throw MeshGeometryError("tetrahedral mesh must be converted before building geometry");
  const int nc = mesh.num_cells();
  const int nf = mesh.num_faces();

  mesh.cell_volume.assign(nc, 0.0);
  mesh.cell_centroid.assign(nc, Vec3::Zero());
  for (int c = 0; c < nc; ++c) {
    const auto& cell = mesh.cells[c];
    double volume = 0.0;
    Vec3 moment = Vec3::Zero();
    for (const auto& t : kHexTets) {
      const Vec3& a = mesh.vertices[cell[t[0]]];
      const Vec3& b = mesh.vertices[cell[t[1]]];
      const Vec3& cc = mesh.vertices[cell[t[2]]];
      const Vec3& d = mesh.vertices[cell[t[3]]];
      double v = tet_volume(a, b, cc, d);
      if (!(v > 0.0))
        throw MeshGeometryError("cell " + std::to_string(c) +
                                " is inverted or non-convex (non-positive sub-volume)");
      volume += v;
      moment += v * (a + b + cc + d) / 4.0;
    }
    mesh.cell_volume[c] = volume;
    mesh.cell_centroid[c] = moment / volume;
  }

  mesh.face_area.assign(nf, 0.0);
  mesh.face_normal.assign(nf, Vec3::Zero());
  mesh.face_centroid.assign(nf, Vec3::Zero());
  mesh.face_delta.assign(nf, Vec3::Zero());
  mesh.face_ndotd.assign(nf, 0.0);
  for (int f = 0; f < nf; ++f) {
    Face& face = mesh.faces[f];
    const Vec3& v0 = mesh.vertices[face.vertices[0]];
    const Vec3& v1 = mesh.vertices[face.vertices[1]];
    const Vec3& v2 = mesh.vertices[face.vertices[2]];
    const Vec3& v3 = mesh.vertices[face.vertices[3]];
    Vec3 area_vec = 0.5 * (v2 - v0).cross(v3 - v1);
    double area = area_vec.norm();
    if (area < 1e-20) throw MeshGeometryError("degenerate face " + std::to_string(f));

    double a1 = 0.5 * (v1 - v0).cross(v2 - v0).norm();
    double a2 = 0.5 * (v2 - v0).cross(v3 - v0).norm();
    Vec3 centroid = (a1 * (v0 + v1 + v2) + a2 * (v0 + v2 + v3)) / (3.0 * (a1 + a2));

    const Vec3& owner_c = mesh.cell_centroid[face.owner];
    if (area_vec.dot(centroid - owner_c) < 0.0) {
      std::swap(face.vertices[1], face.vertices[3]);
      area_vec = -area_vec;
    }
    Vec3 normal = area_vec / area;
    Vec3 delta = face.is_boundary() ? Vec3(centroid - owner_c)
                                    : Vec3(mesh.cell_centroid[face.neighbor] - owner_c);
    double ndotd = normal.dot(delta);
    if (!(ndotd > 0.0))
      throw MeshGeometryError("face " + std::to_string(f) + " has n.d <= 0 (non-convex cells)");

    mesh.face_area[f] = area;
    mesh.face_normal[f] = normal;
    mesh.face_centroid[f] = centroid;
    mesh.face_delta[f] = delta;
    mesh.face_ndotd[f] = ndotd;
  }
  return mesh;
}

VertexWeights vertex_weights(const Mesh& mesh) {
  VertexWeights w;
  w.offsets.reserve(mesh.vertices.size() + 1);
  w.offsets.push_back(0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto& adj = mesh.vertex_cells[v];
    if (adj.empty())
      throw MeshGeometryError("vertex " + std::to_string(v) + " has no adjacent cells");
    for (int c : adj) {
      w.cells.push_back(c);
      w.weights.push_back(1.0 / static_cast<double>(adj.size()));
    }
    w.offsets.push_back(static_cast<int>(w.cells.size()));
  }
  return w;
}

Mesh read_mesh(const std::string& path) {
  Mesh mesh = load_msh(path);
  if (!mesh.tets.empty()) mesh = tets_to_hexes(mesh);
  return build_geometry(std::move(mesh));
}

}  // namespace castfv
