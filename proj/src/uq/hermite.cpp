#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "castfv/error.hpp"
#include "castfv/uq.hpp"

namespace castfv {

void InputDistribution::validate() const {
  if (mean.size() != stddev.size()) throw ConfigError("input distribution: mean and stddev sizes differ");
  if (!names.empty() && static_cast<Eigen::Index>(names.size()) != mean.size())
    throw ConfigError("input distribution: name count differs from dimension");
  for (Eigen::Index k = 0; k < stddev.size(); ++k)
    if (!(stddev[k] > 0.0)) throw ConfigError("input distribution: stddev must be positive");
}

Eigen::VectorXd InputDistribution::standardize(const Eigen::VectorXd& x) const {
  return ((x - mean).array() / stddev.array()).matrix();
}

Eigen::VectorXd InputDistribution::physical(const Eigen::VectorXd& xi) const {
  return (mean.array() + stddev.array() * xi.array()).matrix();
}

double hermite(int j, double x) {
  if (j < 0) throw NumericalError("hermite: negative order");
  if (j == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int k = 1; k < j; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

Quadrature1D gauss_hermite(int n) {
  if (n < 1) throw NumericalError("gauss_hermite: need at least one node");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  Quadrature1D q;
  q.nodes = eig.eigenvalues();
  q.weights = eig.eigenvectors().row(0).array().square();
  // Enforce exact symmetry about zero.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (q.nodes[j] - q.nodes[i]);
    const double w = 0.5 * (q.weights[i] + q.weights[j]);
    q.nodes[i] = -x;
    q.nodes[j] = x;
    q.weights[i] = q.weights[j] = w;
  }
  if (n % 2) q.nodes[n / 2] = 0.0;
  q.weights /= q.weights.sum();
  return q;
}

std::vector<MultiIndex> total_order_indices(int dim, int order) {
  if (dim < 1 || order < 0) throw NumericalError("total_order_indices: invalid dimension or order");
  std::vector<MultiIndex> out;
  // For each degree, enumerate in lexicographic order with the first entry largest first.
  for (int degree = 0; degree <= order; ++degree) {
    std::vector<MultiIndex> level;
    MultiIndex a(dim, 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
      if (pos == dim - 1) {
        a[pos] = remaining;
        level.push_back(a);
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        a[pos] = v;
        self(self, pos + 1, remaining - v);
      }
    };
    rec(rec, 0, degree);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

double hermite_product(const MultiIndex& alpha, const Eigen::VectorXd& xi) {
  double v = 1.0;
  for (std::size_t k = 0; k < alpha.size(); ++k)
    if (alpha[k]) v *= hermite(alpha[k], xi[static_cast<Eigen::Index>(k)]);
  return v;
}

double basis_norm2(const MultiIndex& alpha) {
  double v = 1.0;
  for (int a : alpha) v *= std::tgamma(a + 1.0);
  return v;
}

}  // namespace castfv
