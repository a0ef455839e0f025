#pragma once

#include <stdexcept>
#include <string>

namespace castfv {

/// Malformed or unsupported mesh input. `line` is 1-based, 0 when unknown.
class MeshFormatError : public std::runtime_error {
 public:
  MeshFormatError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Geometric or topological defect found while building a mesh.
class MeshGeometryError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure: singular stencils, diverged solves, unconverged loops.
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace castfv
