#include <cstdio>
#include <sstream>

#include "castfv/error.hpp"
#include "castfv/linsolve.hpp"

namespace castfv {

namespace {

std::string format_history(const std::vector<double>& history) {
  std::ostringstream out;
  const std::size_t shown = std::min<std::size_t>(history.size(), 12);
  for (std::size_t k = 0; k < shown; ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.3e", k ? " " : "", history[history.size() - shown + k]);
    out << buf;
  }
  return out.str();
}

}  // namespace

SolveReport solve_auto(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                       const SolverOptions& options) {
  if (A.rows() != A.cols() || b.size() != A.rows()) throw NumericalError("solve_auto: dimension mismatch");
  if (x.size() != b.size()) x = Eigen::VectorXd::Zero(b.size());
  const Eigen::VectorXd x0 = x;

  std::string amg_reason;
  std::vector<double> amg_history;
  AmgHierarchy amg = amg_setup(A, options.theta, options.max_levels, options.coarse_size);
  if (amg.ok()) {
    SolveReport report = bicgstab(A, b, x, options.tol, options.max_iter, amg.preconditioner(), true);
    report.method = SolveMethod::AmgKrylov;
    if (!report.diverged) return report;
    amg_reason = report.reason;
    amg_history = std::move(report.history);
  } else {
    amg_reason = "setup failed: " + amg.failure();
  }

  x = x0;
  SolveReport report = bicgstab(A, b, x, options.tol, options.max_iter);
  report.method = SolveMethod::BiCGSTAB;
  report.amg_history = amg_history;
  if (report.diverged)
    throw NumericalError("linear solve failed. AMG path: " + amg_reason + " [" + format_history(amg_history) +
                         "]; BiCGSTAB path: " + report.reason + " [" + format_history(report.history) + "]");
  if (report.reason.empty()) report.reason = "fallback after AMG " + amg_reason;
  return report;
}

}  // namespace castfv
