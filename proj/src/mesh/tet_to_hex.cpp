#include <algorithm>
#include <map>

#include <Eigen/Geometry>

#include "castfv/error.hpp"
#include "castfv/mesh.hpp"

namespace castfv {

namespace {

class MidpointCache {
 public:
  explicit MidpointCache(std::vector<Vec3>& vertices) : vertices_(vertices) {}

  int edge(int a, int b) {
    std::array<int, 3> key{std::min(a, b), std::max(a, b), -1};
    return lookup(key, [&] { return 0.5 * (vertices_[a] + vertices_[b]); });
  }

  int face(int a, int b, int c) {
    std::array<int, 3> key{a, b, c};
    std::sort(key.begin(), key.end());
    return lookup(key, [&] { return (vertices_[a] + vertices_[b] + vertices_[c]) / 3.0; });
  }

 private:
  template <typename MakePoint>
  int lookup(const std::array<int, 3>& key, MakePoint make) {
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int idx = static_cast<int>(vertices_.size());
    vertices_.push_back(make());
    index_.emplace(key, idx);
    return idx;
  }

  std::vector<Vec3>& vertices_;
  std::map<std::array<int, 3>, int> index_;
};

}  // namespace

Mesh tets_to_hexes(const Mesh& mesh) {
  if (mesh.tets.empty()) throw MeshGeometryError("no tetrahedra to convert");
  std::vector<Vec3> vertices = mesh.vertices;
  MidpointCache cache(vertices);
  std::vector<std::array<int, 8>> hexes;
  hexes.reserve(4 * mesh.tets.size());

  for (const auto& tet : mesh.tets) {
    int centre = static_cast<int>(vertices.size());
    vertices.push_back((vertices[tet[0]] + vertices[tet[1]] + vertices[tet[2]] + vertices[tet[3]]) / 4.0);
    for (int k = 0; k < 4; ++k) {
      int a = tet[k], b = tet[(k + 1) % 4], c = tet[(k + 2) % 4], d = tet[(k + 3) % 4];
      std::array<int, 8> h{a,
                           cache.edge(a, b),
                           cache.face(a, b, c),
                           cache.edge(a, c),
                           cache.edge(a, d),
                           cache.face(a, b, d),
                           centre,
                           cache.face(a, c, d)};
      const Vec3& p0 = vertices[h[0]];
      double orient = (vertices[h[1]] - p0).cross(vertices[h[3]] - p0).dot(vertices[h[4]] - p0);
      if (orient == 0.0) throw MeshGeometryError("degenerate tetrahedron");
      if (orient < 0.0) {
        std::swap(h[1], h[3]);
        std::swap(h[5], h[7]);
      }
      hexes.push_back(h);
    }
  }

  std::vector<TaggedFacet> facets;
  for (const auto& tri : mesh.pending_facets) {
    if (tri.vertices.size() != 3) continue;
    for (int k = 0; k < 3; ++k) {
      int p = tri.vertices[k], q = tri.vertices[(k + 1) % 3], r = tri.vertices[(k + 2) % 3];
      TaggedFacet quad;
      quad.patch = tri.patch;
      quad.vertices = {p, cache.edge(p, q), cache.face(p, q, r), cache.edge(p, r)};
      facets.push_back(std::move(quad));
    }
  }
  return make_hex_mesh(std::move(vertices), std::move(hexes), facets, mesh.patch_names);
}

}  // namespace castfv
