#include <doctest.h>

#include <cmath>

#include "castfv/uq.hpp"
#include "helpers.hpp"

using namespace castfv;
using castfv::testing::scratch_dir;

namespace {

InputDistribution dist2() {
  InputDistribution d;
  d.names = {"a", "b"};
  d.mean = Eigen::Vector2d(10.0, 500.0);
  d.stddev = Eigen::Vector2d(0.2, 5.0);
  return d;
}

template <typename F>
PceModel fit_on_grid(int level, int order, F&& f) {
  const SparseGrid g = smolyak_grid(2, level);
  Eigen::VectorXd y(g.size());
  for (int m = 0; m < g.size(); ++m) y[m] = f(Eigen::VectorXd(g.nodes.col(m)));
  return fit_pce(g.nodes, y, order, dist2());
}

double coeff(const PceModel& m, const MultiIndex& a) {
  for (std::size_t i = 0; i < m.basis.size(); ++i)
    if (m.basis[i] == a) return m.coeffs[static_cast<Eigen::Index>(i)];
  return NAN;
}

}  // namespace

TEST_SUITE("uq") {

TEST_CASE("Hermite recurrence") {
  CHECK(hermite(2, 2.0) == 3.0);
  CHECK(hermite(0, 17.0) == 1.0);
  CHECK(hermite(3, 1.5) == doctest::Approx(1.5 * 1.5 * 1.5 - 3 * 1.5));
}

TEST_CASE("Hermite orthogonality under Gauss-Hermite quadrature") {
  const Quadrature1D q = gauss_hermite(10);
  CHECK(q.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
  for (int j = 0; j <= 8; ++j)
    for (int k = 0; j + k <= 8; ++k) {
      double s = 0.0;
      for (int i = 0; i < 10; ++i) s += q.weights[i] * hermite(j, q.nodes[i]) * hermite(k, q.nodes[i]);
      if (j == k)
        CHECK(s == doctest::Approx(std::tgamma(j + 1.0)).epsilon(1e-10));
      else
        CHECK(std::abs(s) < 1e-10);
    }
}

TEST_CASE("sparse grid moments") {
  const SparseGrid one = smolyak_grid(3, 1);
  CHECK(one.size() == 1);
  CHECK(one.weights[0] == doctest::Approx(1.0));
  CHECK(one.nodes.col(0).norm() == 0.0);
  const SparseGrid g = smolyak_grid(2, 2);
  CHECK(integrate(g, [](const Eigen::VectorXd&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate(g, [](const Eigen::VectorXd& x) { return x[0] * x[0]; }) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(integrate(g, [](const Eigen::VectorXd& x) { return x[0] * x[1]; })) < 1e-12);
  CHECK(std::abs(integrate(g, [](const Eigen::VectorXd& x) { return x[0] * x[0] * x[0]; })) < 1e-12);
}

TEST_CASE("standardization round trip") {
  const InputDistribution d = dist2();
  CHECK(d.standardize(d.mean).norm() == 0.0);
  CHECK(d.standardize(d.mean + d.stddev).isApprox(Eigen::Vector2d(1.0, 1.0)));
  const Eigen::Vector2d x(10.37, 488.1);
  CHECK((d.physical(d.standardize(x)) - x).cwiseAbs().maxCoeff() < 1e-12);
  InputDistribution bad = d;
  bad.stddev[1] = 0.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("basis size and ordering") {
  CHECK(total_order_indices(2, 2).size() == 6);
  CHECK(total_order_indices(4, 3).size() == 35);
  const auto b = total_order_indices(2, 1);
  CHECK(b[0] == MultiIndex{0, 0});
  CHECK(basis_norm2({2, 3}) == 12.0);
}

TEST_CASE("fitting reproduces low-order polynomials") {
  const PceModel lin = fit_on_grid(3, 2, [](const Eigen::VectorXd& x) { return x[0]; });
  for (std::size_t i = 0; i < lin.basis.size(); ++i)
    CHECK(std::abs(lin.coeffs[static_cast<Eigen::Index>(i)] - (lin.basis[i] == MultiIndex{1, 0} ? 1.0 : 0.0)) < 1e-10);
  const PceModel c = fit_on_grid(3, 2, [](const Eigen::VectorXd&) { return 4.5; });
  CHECK(c.mean() == doctest::Approx(4.5));
  CHECK(c.variance() < 1e-20);
  const PceModel sq = fit_on_grid(3, 2, [](const Eigen::VectorXd& x) { return x[0] * x[0]; });
  CHECK(coeff(sq, {0, 0}) == doctest::Approx(1.0));
  CHECK(coeff(sq, {2, 0}) == doctest::Approx(1.0));
  CHECK(std::abs(coeff(sq, {1, 1})) < 1e-10);
}

TEST_CASE("fitted polynomial matches at Latin-hypercube points") {
  auto f = [](const Eigen::VectorXd& x) { return 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1] + x[1] * x[1] * x[1]; };
  const PceModel m = fit_on_grid(4, 3, f);
  const Eigen::MatrixXd test = latin_hypercube(2, 60, 11);
  Eigen::VectorXd pred(60), ref(60);
  for (int i = 0; i < 60; ++i) {
    pred[i] = m.evaluate(test.col(i));
    ref[i] = f(test.col(i));
  }
  CHECK(normalized_rms_error(pred, ref) < 1e-10);
  CHECK(m.evaluate_physical(m.dist.mean) == doctest::Approx(f(Eigen::Vector2d::Zero())));
}

TEST_CASE("fitting needs more samples than basis functions") {
  const SparseGrid g = smolyak_grid(2, 1);
  CHECK_THROWS(fit_pce(g.nodes, Eigen::VectorXd::Ones(1), 2, dist2()));
}

TEST_CASE("fit does not depend on sample order") {
  auto f = [](const Eigen::VectorXd& x) { return std::exp(0.3 * x[0]) + x[1]; };
  const SparseGrid g = smolyak_grid(2, 3);
  Eigen::VectorXd y(g.size());
  for (int m = 0; m < g.size(); ++m) y[m] = f(g.nodes.col(m));
  const PceModel a = fit_pce(g.nodes, y, 2, dist2());
  const Eigen::MatrixXd nodes = g.nodes.rowwise().reverse();
  const Eigen::VectorXd yr = y.reverse();
  const PceModel b = fit_pce(nodes, yr, 2, dist2());
  CHECK((a.coeffs - b.coeffs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Sobol indices of additive and product models") {
  const PceModel add = fit_on_grid(3, 2, [](const Eigen::VectorXd& x) { return x[0] + 2.0 * x[1]; });
  const SobolIndices s = sobol_indices(add);
  REQUIRE(s.defined);
  CHECK(s.first[0] == doctest::Approx(0.2));
  CHECK(s.first[1] == doctest::Approx(0.8));
  CHECK(s.total[0] == doctest::Approx(0.2));
  CHECK(s.total[1] == doctest::Approx(0.8));
  const PceModel prod = fit_on_grid(3, 2, [](const Eigen::VectorXd& x) { return x[0] * x[1]; });
  const SobolIndices p = sobol_indices(prod);
  CHECK(std::abs(p.first[0]) < 1e-10);
  CHECK(std::abs(p.first[1]) < 1e-10);
  CHECK(p.total[0] == doctest::Approx(1.0));
  CHECK(p.total[1] == doctest::Approx(1.0));
  const PceModel flat = fit_on_grid(3, 2, [](const Eigen::VectorXd&) { return 2.0; });
  CHECK_FALSE(sobol_indices(flat).defined);
}

TEST_CASE("response surface") {
  const PceModel m = fit_on_grid(3, 2, [](const Eigen::VectorXd& x) { return 3.0 * x[0]; });
  const ResponseSurface rs = response_surface(m, 0, 1, 7);
  REQUIRE(rs.values.rows() == 7);
  REQUIRE(rs.values.cols() == 7);
  CHECK(rs.x[0] == doctest::Approx(10.0 - 0.6));
  CHECK(rs.x[6] == doctest::Approx(10.0 + 0.6));
  for (int a = 0; a < 7; ++a)
    for (int b = 1; b < 7; ++b) CHECK(rs.values(a, b) == doctest::Approx(rs.values(a, 0)));
  CHECK(rs.values(0, 0) == doctest::Approx(m.evaluate(Eigen::Vector2d(-3.0, -3.0))));
  CHECK(rs.values(6, 3) - rs.values(3, 3) == doctest::Approx(rs.values(3, 3) - rs.values(0, 3)));
}

TEST_CASE("Latin hypercube stratifies every dimension") {
  const Eigen::MatrixXd s = latin_hypercube(3, 50, 4);
  REQUIRE(s.cols() == 50);
  CHECK(s == latin_hypercube(3, 50, 4));
  for (int d = 0; d < 3; ++d) {
    int below = 0;
    for (int i = 0; i < 50; ++i) below += s(d, i) < 0.0;
    CHECK(below == 25);
  }
}

TEST_CASE("model and sample files round trip") {
  const auto dir = scratch_dir();
  const PceModel m = fit_on_grid(3, 2, [](const Eigen::VectorXd& x) { return 1.0 + x[0] * x[1] + 0.1 * x[1]; });
  write_pce_model((dir / "model.txt").string(), m);
  const PceModel back = read_pce_model((dir / "model.txt").string());
  CHECK(back.basis == m.basis);
  CHECK((back.coeffs - m.coeffs).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.dist.mean - m.dist.mean).norm() == 0.0);
  const SparseGrid g = smolyak_grid(2, 3);
  write_samples_csv((dir / "samples.csv").string(), g, dist2());
  const Eigen::MatrixXd nodes = read_samples_csv((dir / "samples.csv").string(), 2);
  CHECK((nodes - g.nodes).cwiseAbs().maxCoeff() < 1e-15);
}

}  // TEST_SUITE
