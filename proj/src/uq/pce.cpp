#include <cmath>

#include <Eigen/QR>

#include "castfv/error.hpp"
#include "castfv/uq.hpp"

namespace castfv {

double PceModel::evaluate(const Eigen::VectorXd& xi) const {
  if (xi.size() != dim) throw NumericalError("PceModel::evaluate: wrong input dimension");
  double v = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) v += coeffs[static_cast<Eigen::Index>(i)] * hermite_product(basis[i], xi);
  return v;
}

double PceModel::variance() const {
  double v = 0.0;
  for (std::size_t i = 1; i < basis.size(); ++i) {
    const double c = coeffs[static_cast<Eigen::Index>(i)];
    v += c * c * basis_norm2(basis[i]);
  }
  return v;
}

Eigen::MatrixXd vandermonde(const std::vector<MultiIndex>& basis, const Eigen::MatrixXd& samples) {
  Eigen::MatrixXd V(samples.cols(), static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index m = 0; m < samples.cols(); ++m) {
    const Eigen::VectorXd xi = samples.col(m);
    for (std::size_t i = 0; i < basis.size(); ++i) V(m, static_cast<Eigen::Index>(i)) = hermite_product(basis[i], xi);
  }
  return V;
}

PceModel fit_pce(const Eigen::MatrixXd& samples, const Eigen::VectorXd& outputs, int order,
                 const InputDistribution& dist) {
  dist.validate();
  if (samples.rows() != dist.dim()) throw NumericalError("fit_pce: sample dimension differs from the distribution");
  if (samples.cols() != outputs.size()) throw NumericalError("fit_pce: sample and output counts differ");
  PceModel model;
  model.dim = dist.dim();
  model.order = order;
  model.dist = dist;
  model.basis = total_order_indices(model.dim, order);
  const Eigen::Index P = static_cast<Eigen::Index>(model.basis.size());
  if (samples.cols() <= P)
    throw NumericalError("fit_pce: " + std::to_string(samples.cols()) + " samples do not overdetermine " +
                         std::to_string(P) + " basis functions");
  const Eigen::MatrixXd V = vandermonde(model.basis, samples);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
  qr.setThreshold(1e-12);
  if (qr.rank() < P)
    throw NumericalError("fit_pce: rank-deficient Vandermonde matrix (rank " + std::to_string(qr.rank()) + " of " +
                         std::to_string(P) + ")");
  model.coeffs = qr.solve(outputs);
  return model;
}

SobolIndices sobol_indices(const PceModel& model) {
  SobolIndices s;
  s.first = Eigen::VectorXd::Zero(model.dim);
  s.total = Eigen::VectorXd::Zero(model.dim);
  s.variance = model.variance();
  const double scale = model.coeffs.size() ? model.coeffs.cwiseAbs2().maxCoeff() : 0.0;
  s.defined = s.variance > 1e-24 * scale && s.variance > 0.0;
  if (!s.defined) {
    s.first.setConstant(std::nan(""));
    s.total.setConstant(std::nan(""));
    return s;
  }
  for (std::size_t i = 1; i < model.basis.size(); ++i) {
    const MultiIndex& a = model.basis[i];
    const double c = model.coeffs[static_cast<Eigen::Index>(i)];
    const double part = c * c * basis_norm2(a) / s.variance;
    int active = 0, last = -1;
    for (int k = 0; k < model.dim; ++k)
      if (a[k]) {
        ++active;
        last = k;
        s.total[k] += part;
      }
    if (active == 1) s.first[last] += part;
  }
  return s;
}

ResponseSurface response_surface(const PceModel& model, int dim_x, int dim_y, int resolution,
                                 const Eigen::VectorXd& fixed) {
  if (dim_x < 0 || dim_x >= model.dim || dim_y < 0 || dim_y >= model.dim || dim_x == dim_y)
    throw NumericalError("response_surface: invalid dimensions");
  if (resolution < 2) throw NumericalError("response_surface: resolution must be at least 2");
  if (fixed.size() && fixed.size() != model.dim) throw NumericalError("response_surface: fixed values have the wrong size");
  const InputDistribution& d = model.dist;
  ResponseSurface r;
  r.dim_x = dim_x;
  r.dim_y = dim_y;
  r.x = Eigen::VectorXd::LinSpaced(resolution, d.mean[dim_x] - 3.0 * d.stddev[dim_x], d.mean[dim_x] + 3.0 * d.stddev[dim_x]);
  r.y = Eigen::VectorXd::LinSpaced(resolution, d.mean[dim_y] - 3.0 * d.stddev[dim_y], d.mean[dim_y] + 3.0 * d.stddev[dim_y]);
  r.values.resize(resolution, resolution);
  Eigen::VectorXd x = fixed.size() ? fixed : d.mean;
  for (int a = 0; a < resolution; ++a)
    for (int b = 0; b < resolution; ++b) {
      x[dim_x] = r.x[a];
      x[dim_y] = r.y[b];
      r.values(a, b) = model.evaluate_physical(x);
    }
  return r;
}

}  // namespace castfv
