#include "castfv/error.hpp"
#include "castfv/mesh.hpp"

namespace castfv {

Mesh make_box_mesh(int nx, int ny, int nz, const Vec3& lo, const Vec3& hi) {
  if (nx < 1 || ny < 1 || nz < 1) throw MeshGeometryError("box mesh needs at least one cell per direction");
  if (!((hi - lo).array() > 0.0).all()) throw MeshGeometryError("box mesh extent must be positive");

  auto vid = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };
  std::vector<Vec3> vertices;
  vertices.reserve((nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        vertices.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx, lo.y() + (hi.y() - lo.y()) * j / ny,
                              lo.z() + (hi.z() - lo.z()) * k / nz);

  std::vector<std::array<int, 8>> cells;
  cells.reserve(nx * ny * nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        cells.push_back({vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k),
                         vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i + 1, j + 1, k + 1),
                         vid(i, j + 1, k + 1)});

  std::vector<std::string> names{"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
  std::vector<TaggedFacet> facets;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j) {
      facets.push_back({{vid(0, j, k), vid(0, j + 1, k), vid(0, j + 1, k + 1), vid(0, j, k + 1)}, 0});
      facets.push_back({{vid(nx, j, k), vid(nx, j + 1, k), vid(nx, j + 1, k + 1), vid(nx, j, k + 1)}, 1});
    }
  for (int k = 0; k < nz; ++k)
    for (int i = 0; i < nx; ++i) {
      facets.push_back({{vid(i, 0, k), vid(i + 1, 0, k), vid(i + 1, 0, k + 1), vid(i, 0, k + 1)}, 2});
      facets.push_back({{vid(i, ny, k), vid(i + 1, ny, k), vid(i + 1, ny, k + 1), vid(i, ny, k + 1)}, 3});
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      facets.push_back({{vid(i, j, 0), vid(i + 1, j, 0), vid(i + 1, j + 1, 0), vid(i, j + 1, 0)}, 4});
      facets.push_back({{vid(i, j, nz), vid(i + 1, j, nz), vid(i + 1, j + 1, nz), vid(i, j + 1, nz)}, 5});
    }
  return build_geometry(make_hex_mesh(std::move(vertices), std::move(cells), facets, std::move(names)));
}

}  // namespace castfv
