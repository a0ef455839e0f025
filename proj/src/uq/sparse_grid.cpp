#include <cmath>
#include <map>

#include "castfv/error.hpp"
#include "castfv/uq.hpp"

namespace castfv {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Every level vector i (entries >= 1) with |i| = total.
void level_vectors(int dim, int total, std::vector<std::vector<int>>& out) {
  std::vector<int> i(dim, 1);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == dim - 1) {
      i[pos] = remaining;
      out.push_back(i);
      return;
    }
    for (int v = 1; v <= remaining - (dim - 1 - pos); ++v) {
      i[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  if (total >= dim) rec(rec, 0, total);
}

}  // namespace

SparseGrid smolyak_grid(int dim, int level) {
  if (dim < 1 || level < 1) throw NumericalError("smolyak_grid: dimension and level must be at least 1");
  const int q = level + dim - 1;
  std::vector<Quadrature1D> rules(level + 1);
  for (int i = 1; i <= level; ++i) rules[i] = gauss_hermite(i);

  std::map<std::vector<long long>, std::pair<Eigen::VectorXd, double>> merged;
  for (int total = std::max(dim, q - dim + 1); total <= q; ++total) {
    const double coef = ((q - total) % 2 ? -1.0 : 1.0) * binomial(dim - 1, q - total);
    if (coef == 0.0) continue;
    std::vector<std::vector<int>> levels;
    level_vectors(dim, total, levels);
    for (const auto& lv : levels) {
      std::vector<int> idx(dim, 0);
      while (true) {
        Eigen::VectorXd x(dim);
        double w = coef;
        std::vector<long long> key(dim);
        for (int k = 0; k < dim; ++k) {
          x[k] = rules[lv[k]].nodes[idx[k]];
          w *= rules[lv[k]].weights[idx[k]];
          key[k] = std::llround(x[k] * 1e10);
        }
        auto it = merged.find(key);
        if (it == merged.end())
          merged.emplace(std::move(key), std::make_pair(x, w));
        else
          it->second.second += w;
        int k = 0;
        while (k < dim && ++idx[k] == lv[k]) idx[k++] = 0;
        if (k == dim) break;
      }
    }
  }

  SparseGrid g;
  g.dim = dim;
  g.level = level;
  g.nodes.resize(dim, static_cast<Eigen::Index>(merged.size()));
  g.weights.resize(static_cast<Eigen::Index>(merged.size()));
  Eigen::Index m = 0;
  for (const auto& [key, node] : merged) {
    g.nodes.col(m) = node.first;
    g.weights[m] = node.second;
    ++m;
  }
  return g;
}

}  // namespace castfv
