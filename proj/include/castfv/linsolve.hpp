#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace castfv {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

struct LinearSystem {
  SparseMatrix A;
  Eigen::VectorXd b;
};

bool is_symmetric(const SparseMatrix& A, double tol = 1e-12);

enum class SolveMethod { AmgKrylov, BiCGSTAB };

const char* to_string(SolveMethod method);

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;  // ||b - Ax|| / ||b||, recomputed from the returned x
  SolveMethod method = SolveMethod::BiCGSTAB;
  bool diverged = false;
  std::string reason;              // why the solve stopped when diverged
  std::vector<double> history;     // relative residual per iteration
  std::vector<double> amg_history; // AMG attempt history when a fallback happened
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 1000;
  double theta = 0.25;
  int max_levels = 25;
  int coarse_size = 64;
};

/// z = M^{-1} r
using Preconditioner = std::function<void(const Eigen::VectorXd& r, Eigen::VectorXd& z)>;

/// Right-preconditioned BiCGSTAB. x holds the initial guess on entry.
/// With `stop_on_growth` the solve gives up after three consecutive
/// increases of the relative residual.
SolveReport bicgstab(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
                     int max_iter, const Preconditioner& precond = {}, bool stop_on_growth = false);

struct AmgLevel {
  SparseMatrix A;
  SparseMatrix P;  // prolongation from the next coarser level
  SparseMatrix R;  // restriction, P^T
  Eigen::VectorXd diag;
};

class AmgHierarchy {
 public:
  bool ok() const { return ok_; }
  const std::string& failure() const { return failure_; }
  int num_levels() const { return static_cast<int>(levels_.size()); }
  const std::vector<AmgLevel>& levels() const { return levels_; }

  /// One V(1,1) cycle improving x for A x = b on the finest level.
  void vcycle(const Eigen::VectorXd& b, Eigen::VectorXd& x) const;
  Preconditioner preconditioner() const;

 private:
  friend AmgHierarchy amg_setup(const SparseMatrix&, double, int, int);
  void cycle(int level, const Eigen::VectorXd& b, Eigen::VectorXd& x) const;

  std::vector<AmgLevel> levels_;
  Eigen::FullPivLU<Eigen::MatrixXd> coarse_lu_;
  bool coarse_direct_ = true;
  bool ok_ = false;
  std::string failure_;
};

/// Classical Ruge-Stueben coarsening, direct interpolation, Galerkin
/// coarse operators. A zero diagonal or singular coarsest operator yields
/// a hierarchy with ok() == false.
AmgHierarchy amg_setup(const SparseMatrix& A, double theta = 0.25, int max_levels = 25, int coarse_size = 64);

void gauss_seidel_forward(const SparseMatrix& A, const Eigen::VectorXd& diag, const Eigen::VectorXd& b,
                          Eigen::VectorXd& x);
void gauss_seidel_backward(const SparseMatrix& A, const Eigen::VectorXd& diag, const Eigen::VectorXd& b,
                           Eigen::VectorXd& x);

/// AMG-preconditioned BiCGSTAB with automatic fallback to plain BiCGSTAB.
/// Throws NumericalError when both paths fail.
SolveReport solve_auto(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                       const SolverOptions& options = {});

void write_matrix_market(const SparseMatrix& A, const std::string& path);

}  // namespace castfv
