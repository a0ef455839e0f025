#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "castfv/app.hpp"
#include "castfv/error.hpp"

namespace castfv {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  return os;
}

}  // namespace

void write_vtk(const Mesh& mesh, const std::vector<NamedField>& fields, const std::string& path) {
  const int n = mesh.num_cells();
  for (const auto& [name, values] : fields)
    if (static_cast<int>(values.size()) != n)
      throw ConfigError("field '" + name + "' has " + std::to_string(values.size()) + " values for " +
                        std::to_string(n) + " cells");
  std::ofstream os = open_out(path);
  os << "# vtk DataFile Version 3.0\n";
  os << "castfv cell data; undefined values are written as -1\n";
  os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec3& v : mesh.vertices) os << num(v.x()) << " " << num(v.y()) << " " << num(v.z()) << "\n";
  os << "CELLS " << n << " " << 9 * n << "\n";
  for (const auto& c : mesh.cells) {
    os << 8;
    for (int v : c) os << " " << v;
    os << "\n";
  }
  os << "CELL_TYPES " << n << "\n";
  for (int c = 0; c < n; ++c) os << "12\n";
  if (fields.empty()) return;
  os << "CELL_DATA " << n << "\n";
  for (const auto& [name, values] : fields) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) os << (std::isfinite(v) ? num(v) : "-1") << "\n";
  }
  if (!os) throw ConfigError("error while writing " + path);
}

std::vector<int> locate_probes(const Mesh& mesh, const std::vector<ProbeSpec>& probes) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const Vec3& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  std::vector<int> cells;
  for (const auto& p : probes) {
    if ((p.position.array() < lo.array()).any() || (p.position.array() > hi.array()).any())
      throw ConfigError("probe '" + p.name + "' lies outside the mesh bounding box");
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const double d = (mesh.cell_centroid[c] - p.position).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    cells.push_back(best);
  }
  return cells;
}

void write_probes(const std::string& path, const std::vector<std::string>& names, const std::vector<double>& times,
                  const std::vector<std::vector<double>>& traces) {
  if (times.size() != traces.size()) throw ConfigError("probe traces are not aligned with the time column");
  std::ofstream os = open_out(path);
  os << "time";
  for (const auto& n : names) os << "," << n;
  os << "\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (traces[i].size() != names.size()) throw ConfigError("probe trace row has the wrong length");
    os << num(times[i]);
    for (double v : traces[i]) os << "," << num(v);
    os << "\n";
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream os = open_out(path);
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << num(row[k]);
    os << "\n";
  }
}

}  // namespace castfv
