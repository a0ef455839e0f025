#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "castfv/error.hpp"
#include "castfv/uq.hpp"

namespace castfv {

Eigen::MatrixXd latin_hypercube(int dim, int n, std::uint64_t seed) {
  if (dim < 1 || n < 1) throw NumericalError("latin_hypercube: dimension and count must be positive");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const boost::math::normal_distribution<double> normal;
  Eigen::MatrixXd out(dim, n);
  std::vector<int> perm(n);
  for (int k = 0; k < dim; ++k) {
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng() % static_cast<std::uint64_t>(i + 1)]);
    for (int i = 0; i < n; ++i) {
      double u = (perm[i] + uniform()) / n;
      u = std::clamp(u, 1e-300, 1.0 - 1e-16);
      out(k, i) = boost::math::quantile(normal, u);
    }
  }
  return out;
}

double normalized_rms_error(const Eigen::VectorXd& predicted, const Eigen::VectorXd& reference) {
  if (predicted.size() != reference.size() || reference.size() == 0)
    throw NumericalError("normalized_rms_error: size mismatch");
  const double rms = std::sqrt((predicted - reference).squaredNorm() / reference.size());
  return rms / reference.cwiseAbs().maxCoeff();
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  return os;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string input_name(const InputDistribution& d, int k) {
  return k < static_cast<int>(d.names.size()) ? d.names[k] : "x" + std::to_string(k + 1);
}

}  // namespace

void write_samples_csv(const std::string& path, const SparseGrid& grid, const InputDistribution& dist) {
  std::ofstream os = open_out(path);
  os << "index,weight";
  for (int k = 0; k < grid.dim; ++k) os << ",xi_" << input_name(dist, k);
  for (int k = 0; k < grid.dim; ++k) os << "," << input_name(dist, k);
  os << "\n";
  for (int m = 0; m < grid.size(); ++m) {
    const Eigen::VectorXd xi = grid.nodes.col(m);
    const Eigen::VectorXd x = dist.physical(xi);
    os << m << "," << num(grid.weights[m]);
    for (int k = 0; k < grid.dim; ++k) os << "," << num(xi[k]);
    for (int k = 0; k < grid.dim; ++k) os << "," << num(x[k]);
    os << "\n";
  }
}

Eigen::MatrixXd read_samples_csv(const std::string& path, int dim) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  std::string line;
  std::getline(is, line);
  std::vector<Eigen::VectorXd> cols;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) < 2 + dim) throw ConfigError(path + ": short sample row");
    Eigen::VectorXd xi(dim);
    for (int k = 0; k < dim; ++k) xi[k] = row[2 + k];
    cols.push_back(xi);
  }
  Eigen::MatrixXd out(dim, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t m = 0; m < cols.size(); ++m) out.col(static_cast<Eigen::Index>(m)) = cols[m];
  return out;
}

void write_pce_model(const std::string& path, const PceModel& model) {
  std::ofstream os = open_out(path);
  os << "dim " << model.dim << "\norder " << model.order << "\n";
  for (int k = 0; k < model.dim; ++k)
    os << "input " << input_name(model.dist, k) << " " << num(model.dist.mean[k]) << " "
       << num(model.dist.stddev[k]) << "\n";
  os << "terms " << model.basis.size() << "\n";
  for (std::size_t i = 0; i < model.basis.size(); ++i) {
    for (int a : model.basis[i]) os << a << " ";
    os << num(model.coeffs[static_cast<Eigen::Index>(i)]) << "\n";
  }
}

PceModel read_pce_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  PceModel m;
  std::string tag;
  std::size_t terms = 0;
  if (!(is >> tag >> m.dim) || tag != "dim") throw ConfigError(path + ": expected 'dim'");
  if (!(is >> tag >> m.order) || tag != "order") throw ConfigError(path + ": expected 'order'");
  m.dist.mean.resize(m.dim);
  m.dist.stddev.resize(m.dim);
  for (int k = 0; k < m.dim; ++k) {
    std::string name;
    if (!(is >> tag >> name >> m.dist.mean[k] >> m.dist.stddev[k]) || tag != "input")
      throw ConfigError(path + ": expected 'input'");
    m.dist.names.push_back(name);
  }
  if (!(is >> tag >> terms) || tag != "terms") throw ConfigError(path + ": expected 'terms'");
  m.basis.assign(terms, MultiIndex(m.dim));
  m.coeffs.resize(static_cast<Eigen::Index>(terms));
  for (std::size_t i = 0; i < terms; ++i) {
    for (int k = 0; k < m.dim; ++k) is >> m.basis[i][k];
    is >> m.coeffs[static_cast<Eigen::Index>(i)];
  }
  if (!is) throw ConfigError(path + ": truncated model");
  return m;
}

void write_sobol_csv(const std::string& path, const std::vector<std::string>& outputs,
                     const std::vector<SobolIndices>& indices, const std::vector<std::string>& input_names) {
  std::ofstream os = open_out(path);
  os << "output,input,first_order,total\n";
  for (std::size_t o = 0; o < outputs.size(); ++o)
    for (std::size_t k = 0; k < input_names.size(); ++k) {
      os << outputs[o] << "," << input_names[k] << ",";
      if (indices[o].defined)
        os << num(indices[o].first[static_cast<Eigen::Index>(k)]) << ","
           << num(indices[o].total[static_cast<Eigen::Index>(k)]) << "\n";
      else
        os << "undefined,undefined\n";
    }
}

void write_response_surface_csv(const std::string& path, const ResponseSurface& surface) {
  std::ofstream os = open_out(path);
  os << "x,y,value\n";
  for (Eigen::Index a = 0; a < surface.x.size(); ++a)
    for (Eigen::Index b = 0; b < surface.y.size(); ++b)
      os << num(surface.x[a]) << "," << num(surface.y[b]) << "," << num(surface.values(a, b)) << "\n";
}

}  // namespace castfv
