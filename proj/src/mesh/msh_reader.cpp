// GMSH 2.2 ASCII reader: $MeshFormat, $PhysicalNames, $Nodes, $Elements.

#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "castfv/error.hpp"
#include "castfv/mesh.hpp"

namespace castfv {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }

  std::string expect_line(const char* what) {
    std::string line;
    if (!next(line)) throw MeshFormatError(std::string("unexpected end of file, expected ") + what, line_no_);
    return line;
  }

  void expect_tag(const std::string& tag) {
    std::string line = expect_line(tag.c_str());
    if (trim(line) != tag) throw MeshFormatError("expected " + tag + ", found '" + line + "'", line_no_);
  }

  long expect_count(const char* what) {
    std::string line = expect_line(what);
    std::istringstream ss(line);
    long n = -1;
    if (!(ss >> n) || n < 0) throw MeshFormatError(std::string("bad ") + what + " count", line_no_);
    return n;
  }

  int line_no() const { return line_no_; }

  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

int nodes_per_element(int type) {
  switch (type) {
    case 1: return 2;   // line
    case 2: return 3;   // triangle
    case 3: return 4;   // quad
    case 4: return 4;   // tetrahedron
    case 5: return 8;   // hexahedron
    case 15: return 1;  // point
    default: return -1;
  }
}

struct RawElement {
  int type;
  int physical;
  std::vector<int> nodes;  // node ids as in file
  int line;
};

}  // namespace

Mesh load_msh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshFormatError("cannot open " + path, 0);
  LineReader reader(in);

  std::map<int, std::string> physical_names;
  std::unordered_map<int, int> node_index;
  std::vector<Vec3> nodes;
  std::vector<RawElement> elements;
  bool have_format = false, have_nodes = false, have_elements = false;

  std::string line;
  while (reader.next(line)) {
    std::string tag = LineReader::trim(line);
    if (tag == "$MeshFormat") {
      std::istringstream ss(reader.expect_line("format line"));
      double version = 0.0;
      int file_type = -1, data_size = 0;
      if (!(ss >> version >> file_type >> data_size))
        throw MeshFormatError("malformed $MeshFormat line", reader.line_no());
      if (version < 2.0 || version >= 3.0)
        throw MeshFormatError("unsupported MSH version (need 2.x ASCII)", reader.line_no());
      if (file_type != 0) throw MeshFormatError("binary MSH files are not supported", reader.line_no());
      reader.expect_tag("$EndMeshFormat");
      have_format = true;
    } else if (tag == "$PhysicalNames") {
      long n = reader.expect_count("$PhysicalNames");
      for (long i = 0; i < n; ++i) {
        std::string entry = reader.expect_line("physical name");
        std::istringstream ss(entry);
        int dim = 0, id = 0;
        if (!(ss >> dim >> id)) throw MeshFormatError("malformed physical name entry", reader.line_no());
        auto q1 = entry.find('"');
        auto q2 = entry.rfind('"');
        if (q1 == std::string::npos || q2 == q1)
          throw MeshFormatError("physical name must be quoted", reader.line_no());
        physical_names[id] = entry.substr(q1 + 1, q2 - q1 - 1);
      }
      reader.expect_tag("$EndPhysicalNames");
    } else if (tag == "$Nodes") {
      if (!have_format) throw MeshFormatError("$Nodes before $MeshFormat", reader.line_no());
      long n = reader.expect_count("$Nodes");
      nodes.reserve(n);
      for (long i = 0; i < n; ++i) {
        std::istringstream ss(reader.expect_line("node"));
        int id = 0;
        double x, y, z;
        if (!(ss >> id >> x >> y >> z)) throw MeshFormatError("malformed node line", reader.line_no());
        if (!node_index.emplace(id, static_cast<int>(nodes.size())).second)
          throw MeshFormatError("duplicate node id " + std::to_string(id), reader.line_no());
        nodes.emplace_back(x, y, z);
      }
      reader.expect_tag("$EndNodes");
      have_nodes = true;
    } else if (tag == "$Elements") {
      if (!have_format) throw MeshFormatError("$Elements before $MeshFormat", reader.line_no());
      long n = reader.expect_count("$Elements");
      elements.reserve(n);
      for (long i = 0; i < n; ++i) {
        std::istringstream ss(reader.expect_line("element"));
        int id = 0, type = 0, ntags = 0;
        if (!(ss >> id >> type >> ntags) || ntags < 0)
          throw MeshFormatError("malformed element line", reader.line_no());
        int nn = nodes_per_element(type);
        if (nn < 0)
          throw MeshFormatError("unsupported element type " + std::to_string(type), reader.line_no());
        std::vector<int> tags(ntags);
        for (auto& t : tags)
          if (!(ss >> t)) throw MeshFormatError("truncated element tags", reader.line_no());
        RawElement el{type, ntags > 0 ? tags[0] : 0, std::vector<int>(nn), reader.line_no()};
        for (auto& node : el.nodes)
          if (!(ss >> node)) throw MeshFormatError("truncated element node list", reader.line_no());
        elements.push_back(std::move(el));
      }
      reader.expect_tag("$EndElements");
      have_elements = true;
    } else if (!tag.empty() && tag[0] == '$' && tag.rfind("$End", 0) != 0) {
      // Unknown section: skip to its end marker.
      std::string end = "$End" + tag.substr(1);
      std::string skip;
      bool closed = false;
      while (reader.next(skip))
        if (LineReader::trim(skip) == end) {
          closed = true;
          break;
        }
      if (!closed) throw MeshFormatError("unterminated section " + tag, reader.line_no());
    } else {
      throw MeshFormatError("unexpected content '" + tag + "'", reader.line_no());
    }
  }
  if (!have_format) throw MeshFormatError("missing $MeshFormat section", 0);
  if (!have_nodes) throw MeshFormatError("missing $Nodes section", 0);
  if (!have_elements) throw MeshFormatError("missing $Elements section", 0);

  // Resolve node ids and keep only nodes used by volume elements.
  bool has_hex = false, has_tet = false, has_tri = false, has_quad = false;
  int first_2d_line = 0;
  for (const auto& el : elements) {
    has_hex |= el.type == 5;
    has_tet |= el.type == 4;
    if (el.type == 2 || el.type == 3) {
      has_tri |= el.type == 2;
      has_quad |= el.type == 3;
      if (!first_2d_line) first_2d_line = el.line;
    }
    for (int id : el.nodes)
      if (!node_index.count(id))
        throw MeshFormatError("element references undefined node " + std::to_string(id), el.line);
  }
  if (!has_hex && !has_tet) {
    if (first_2d_line)
      throw MeshFormatError(std::string("unsupported element type ") + (has_tri ? "2" : "3") +
                                " as volume element (no tetrahedra or hexahedra present)",
                            first_2d_line);
    throw MeshFormatError("no volume elements", 0);
  }
  if (has_hex && has_tet) throw MeshFormatError("mixed tetrahedral/hexahedral meshes are not supported", 0);
  (void)has_quad;

  std::vector<int> remap(nodes.size(), -1);
  std::vector<Vec3> used;
  auto resolve = [&](int id) {
    int idx = node_index.at(id);
    if (remap[idx] < 0) {
      remap[idx] = static_cast<int>(used.size());
      used.push_back(nodes[idx]);
    }
    return remap[idx];
  };

  // Physical groups of 2-D elements become patches in order of first appearance.
  std::map<int, int> patch_of_physical;
  std::vector<std::string> patch_names;
  auto patch_for = [&](int physical) {
    auto it = patch_of_physical.find(physical);
    if (it != patch_of_physical.end()) return it->second;
    auto name_it = physical_names.find(physical);
    std::string name = name_it != physical_names.end() ? name_it->second : "tag" + std::to_string(physical);
    int idx = static_cast<int>(patch_names.size());
    patch_names.push_back(name);
    patch_of_physical[physical] = idx;
    return idx;
  };

  std::vector<std::array<int, 8>> hexes;
  std::vector<std::array<int, 4>> tets;
  for (const auto& el : elements) {
    if (el.type == 5) {
      std::array<int, 8> h;
      for (int k = 0; k < 8; ++k) h[k] = resolve(el.nodes[k]);
      hexes.push_back(h);
    } else if (el.type == 4) {
      std::array<int, 4> t;
      for (int k = 0; k < 4; ++k) t[k] = resolve(el.nodes[k]);
      tets.push_back(t);
    }
  }
  std::vector<TaggedFacet> facets;
  for (const auto& el : elements) {
    if (el.type != 2 && el.type != 3) continue;
    if (has_hex && el.type == 2)
      throw MeshFormatError("triangle facet in a hexahedral mesh", el.line);
    if (has_tet && el.type == 3)
      throw MeshFormatError("quadrilateral facet in a tetrahedral mesh", el.line);
    TaggedFacet facet;
    facet.patch = patch_for(el.physical);
    for (int id : el.nodes) {
      int idx = node_index.at(id);
      if (remap[idx] < 0)
        throw MeshFormatError("boundary facet node " + std::to_string(id) + " is not on any volume element",
                              el.line);
      facet.vertices.push_back(remap[idx]);
    }
    facets.push_back(std::move(facet));
  }

  if (has_hex) return make_hex_mesh(std::move(used), std::move(hexes), facets, std::move(patch_names));

  Mesh mesh;
  mesh.vertices = std::move(used);
  mesh.tets = std::move(tets);
  mesh.pending_facets = std::move(facets);
  mesh.patch_names = std::move(patch_names);
  return mesh;
}

}  // namespace castfv
