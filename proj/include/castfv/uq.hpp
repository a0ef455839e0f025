#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace castfv {

/// Independent normal inputs N(mean_k, stddev_k).
struct InputDistribution {
  std::vector<std::string> names;
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  int dim() const { return static_cast<int>(mean.size()); }
  void validate() const;
  Eigen::VectorXd standardize(const Eigen::VectorXd& x) const;
  Eigen::VectorXd physical(const Eigen::VectorXd& xi) const;
};

/// Probabilists' Hermite polynomial He_j(x).
double hermite(int j, double x);

struct Quadrature1D {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;  // sum to 1
};

/// n-point Gauss-Hermite rule for the standard normal density.
Quadrature1D gauss_hermite(int n);

struct SparseGrid {
  int dim = 0;
  int level = 0;
  Eigen::MatrixXd nodes;  // dim x M, standardized
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(nodes.cols()); }
};

/// Smolyak combination of non-nested Gauss-Hermite rules (level i uses i
/// points). Exact for total degree 2*level - 1.
SparseGrid smolyak_grid(int dim, int level);

template <typename F>
double integrate(const SparseGrid& grid, F&& f) {
  double sum = 0.0;
  for (int m = 0; m < grid.size(); ++m) sum += grid.weights[m] * f(Eigen::VectorXd(grid.nodes.col(m)));
  return sum;
}

using MultiIndex = std::vector<int>;

/// All multi-indices with |alpha| <= order, graded lexicographic.
std::vector<MultiIndex> total_order_indices(int dim, int order);

/// prod_k He_{alpha_k}(xi_k)
double hermite_product(const MultiIndex& alpha, const Eigen::VectorXd& xi);

/// ||Psi_alpha||^2 = prod_k alpha_k!
double basis_norm2(const MultiIndex& alpha);

struct PceModel {
  int dim = 0;
  int order = 0;
  std::vector<MultiIndex> basis;
  Eigen::VectorXd coeffs;
  InputDistribution dist;

  double evaluate(const Eigen::VectorXd& xi) const;
  double evaluate_physical(const Eigen::VectorXd& x) const { return evaluate(dist.standardize(x)); }
  double mean() const { return coeffs.size() ? coeffs[0] : 0.0; }
  double variance() const;
};

/// Rows: samples, columns: basis functions.
Eigen::MatrixXd vandermonde(const std::vector<MultiIndex>& basis, const Eigen::MatrixXd& samples);

/// Least-squares fit through column-pivoted QR. samples is dim x M.
PceModel fit_pce(const Eigen::MatrixXd& samples, const Eigen::VectorXd& outputs, int order,
                 const InputDistribution& dist);

struct SobolIndices {
  bool defined = false;  // false when the model has zero variance
  double variance = 0.0;
  Eigen::VectorXd first;
  Eigen::VectorXd total;
};

SobolIndices sobol_indices(const PceModel& model);

struct ResponseSurface {
  int dim_x = 0;
  int dim_y = 0;
  Eigen::VectorXd x;       // physical values of dim_x
  Eigen::VectorXd y;       // physical values of dim_y
  Eigen::MatrixXd values;  // values(a, b) at (x[a], y[b])
};

/// Grid over mean +- 3 sigma of two inputs, remaining inputs held at
/// `fixed` (physical; empty means the means).
ResponseSurface response_surface(const PceModel& model, int dim_x, int dim_y, int resolution,
                                 const Eigen::VectorXd& fixed = {});

/// n Latin-hypercube samples of the d-variate standard normal, dim x n.
Eigen::MatrixXd latin_hypercube(int dim, int n, std::uint64_t seed);

/// sqrt(mean((a - b)^2)) / max|b|
double normalized_rms_error(const Eigen::VectorXd& predicted, const Eigen::VectorXd& reference);

void write_samples_csv(const std::string& path, const SparseGrid& grid, const InputDistribution& dist);
/// Reads standardized coordinates back; returns dim x M.
Eigen::MatrixXd read_samples_csv(const std::string& path, int dim);

void write_pce_model(const std::string& path, const PceModel& model);
PceModel read_pce_model(const std::string& path);

void write_sobol_csv(const std::string& path, const std::vector<std::string>& outputs,
                     const std::vector<SobolIndices>& indices, const std::vector<std::string>& input_names);
void write_response_surface_csv(const std::string& path, const ResponseSurface& surface);

}  // namespace castfv
