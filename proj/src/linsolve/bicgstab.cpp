#include <algorithm>
#include <cmath>
#include <limits>

#include "castfv/error.hpp"
#include "castfv/linsolve.hpp"

namespace castfv {

const char* to_string(SolveMethod method) {
  return method == SolveMethod::AmgKrylov ? "amg-bicgstab" : "bicgstab";
}

bool is_symmetric(const SparseMatrix& A, double tol) {
  if (A.rows() != A.cols()) return false;
  SparseMatrix diff = A - SparseMatrix(A.transpose());
  double scale = 0.0, worst = 0.0;
  for (Eigen::Index k = 0; k < A.nonZeros(); ++k) scale = std::max(scale, std::abs(A.valuePtr()[k]));
  for (Eigen::Index k = 0; k < diff.nonZeros(); ++k) worst = std::max(worst, std::abs(diff.valuePtr()[k]));
  return worst <= tol * scale;
}

SolveReport bicgstab(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
                     int max_iter, const Preconditioner& precond, bool stop_on_growth) {
  using Eigen::VectorXd;
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n) throw NumericalError("bicgstab: dimension mismatch");
  if (x.size() != n) x = VectorXd::Zero(n);

  SolveReport report;
  report.method = precond ? SolveMethod::AmgKrylov : SolveMethod::BiCGSTAB;
  const double bnorm = b.norm();
  if (!std::isfinite(bnorm)) {
    report.diverged = true;
    report.reason = "non-finite right-hand side";
    return report;
  }
  if (bnorm == 0.0) {
    x.setZero();
    return report;
  }

  auto apply_precond = [&](const VectorXd& in, VectorXd& out) {
    if (precond)
      precond(in, out);
    else
      out = in;
  };

  VectorXd r = b - A * x;
  double rel = r.norm() / bnorm;
  if (rel <= tol) {
    report.residual = rel;
    return report;
  }

  VectorXd r_hat = r, p = VectorXd::Zero(n), v = VectorXd::Zero(n);
  VectorXd p_hat(n), s(n), s_hat(n), t(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  int growth = 0;
  double last = rel;
  int restarts = 0;

  for (int it = 1; it <= max_iter; ++it) {
    report.iterations = it;
    double rho_new = r_hat.dot(r);
    if (std::abs(rho_new) < 1e-300 || std::abs(rho_new) < 1e-30 * r_hat.norm() * r.norm()) {
      // Breakdown: restart from the current residual once in a while.
      if (++restarts > 5) {
        report.diverged = true;
        report.reason = "breakdown (rho ~ 0)";
        break;
      }
      r = b - A * x;
      r_hat = r;
      p.setZero();
      v.setZero();
      rho = alpha = omega = 1.0;
      rho_new = r_hat.dot(r);
    }
    double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    p = r + beta * (p - omega * v);
    apply_precond(p, p_hat);
    v.noalias() = A * p_hat;
    double rv = r_hat.dot(v);
    if (rv == 0.0 || !std::isfinite(rv)) {
      report.diverged = true;
      report.reason = "breakdown (r_hat . v = 0)";
      break;
    }
    alpha = rho / rv;
    s = r - alpha * v;
    if (s.norm() / bnorm <= tol) {
      x += alpha * p_hat;
      r = s;
      rel = r.norm() / bnorm;
      report.history.push_back(rel);
    } else {
      apply_precond(s, s_hat);
      t.noalias() = A * s_hat;
      double tt = t.squaredNorm();
      omega = tt > 0.0 ? t.dot(s) / tt : 0.0;
      x += alpha * p_hat + omega * s_hat;
      r = s - omega * t;
      rel = r.norm() / bnorm;
      report.history.push_back(rel);
      if (omega == 0.0) {
        report.diverged = true;
        report.reason = "breakdown (omega = 0)";
        break;
      }
    }

    if (!std::isfinite(rel)) {
      report.diverged = true;
      report.reason = "non-finite residual";
      break;
    }
    if (stop_on_growth) {
      growth = rel > last ? growth + 1 : 0;
      if (growth >= 3) {
        report.diverged = true;
        report.reason = "residual grew for 3 consecutive iterations";
        break;
      }
    }
    last = rel;

    if (rel <= tol) {
      // Guard against drift of the recursive residual.
      r = b - A * x;
      rel = r.norm() / bnorm;
      if (rel <= tol) break;
      r_hat = r;
      p.setZero();
      v.setZero();
      rho = alpha = omega = 1.0;
    }
    if (it == max_iter) {
      report.diverged = true;
      report.reason = "maximum iterations reached";
    }
  }

  report.residual = (b - A * x).norm() / bnorm;
  if (!std::isfinite(report.residual)) {
    report.diverged = true;
    if (report.reason.empty()) report.reason = "non-finite residual";
  } else if (!report.diverged && report.residual > tol) {
    report.diverged = true;
    report.reason = "residual above tolerance";
  }
  return report;
}

}  // namespace castfv
