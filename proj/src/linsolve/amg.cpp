#include <algorithm>
#include <cmath>
#include <set>

#include "castfv/linsolve.hpp"

namespace castfv {

namespace {

enum : signed char { kUndecided = 0, kCoarse = 1, kFine = 2 };

struct Strength {
  std::vector<std::vector<int>> S;   // strong connections of i
  std::vector<std::vector<int>> ST;  // points strongly depending on i
};

Strength strength_of_connection(const SparseMatrix& A, double theta) {
  const int n = static_cast<int>(A.rows());
  Strength st;
  st.S.resize(n);
  st.ST.resize(n);
  for (int i = 0; i < n; ++i) {
    double max_neg = 0.0;
    for (SparseMatrix::InnerIterator it(A, i); it; ++it)
      if (it.col() != i) max_neg = std::max(max_neg, -it.value());
    if (max_neg <= 0.0) continue;
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
      int j = static_cast<int>(it.col());
      if (j != i && -it.value() >= theta * max_neg) st.S[i].push_back(j);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j : st.S[i]) st.ST[j].push_back(i);
  return st;
}

std::vector<signed char> rs_splitting(const Strength& st) {
  const int n = static_cast<int>(st.S.size());
  std::vector<signed char> state(n, kUndecided);
  std::vector<int> lambda(n);
  // Ordered by (-lambda, index): highest measure first, lowest index on ties.
  std::set<std::pair<int, int>> queue;
  for (int i = 0; i < n; ++i) {
    if (st.S[i].empty() && st.ST[i].empty()) {
      state[i] = kFine;
      continue;
    }
    lambda[i] = static_cast<int>(st.ST[i].size());
    queue.emplace(-lambda[i], i);
  }
  auto bump = [&](int k, int delta) {
    if (state[k] != kUndecided) return;
    queue.erase({-lambda[k], k});
    lambda[k] += delta;
    queue.emplace(-lambda[k], k);
  };
  while (!queue.empty()) {
    int i = queue.begin()->second;
    queue.erase(queue.begin());
    if (lambda[i] == 0) {
      // Nothing undecided depends on i: F if it can interpolate from a C point.
      bool has_c = std::any_of(st.S[i].begin(), st.S[i].end(), [&](int j) { return state[j] == kCoarse; });
      state[i] = has_c || st.S[i].empty() ? kFine : kCoarse;
      continue;
    }
    state[i] = kCoarse;
    for (int j : st.ST[i]) {
      if (state[j] != kUndecided) continue;
      queue.erase({-lambda[j], j});
      state[j] = kFine;
      for (int k : st.S[j]) bump(k, 1);
    }
    for (int j : st.S[i]) bump(j, -1);
  }

  // Second pass: strong F-F couplings need a common C point.
  for (int i = 0; i < n; ++i) {
    if (state[i] != kFine) continue;
    for (int j : st.S[i]) {
      if (state[j] != kFine) continue;
      bool common = false;
      for (int k : st.S[i]) {
        if (state[k] != kCoarse) continue;
        if (std::find(st.S[j].begin(), st.S[j].end(), k) != st.S[j].end()) {
          common = true;
          break;
        }
      }
      if (!common) state[j] = kCoarse;
    }
  }
  return state;
}

SparseMatrix direct_interpolation(const SparseMatrix& A, const Strength& st, const std::vector<signed char>& state,
                                  int& num_coarse) {
  const int n = static_cast<int>(A.rows());
  std::vector<int> coarse_index(n, -1);
  num_coarse = 0;
  for (int i = 0; i < n; ++i)
    if (state[i] == kCoarse) coarse_index[i] = num_coarse++;

  std::vector<Triplet> trip;
  std::vector<char> strong_c(n, 0);
  for (int i = 0; i < n; ++i) {
    if (state[i] == kCoarse) {
      trip.emplace_back(i, coarse_index[i], 1.0);
      continue;
    }
    for (int j : st.S[i])
      if (state[j] == kCoarse) strong_c[j] = 1;

    double diag = 0.0, neg_all = 0.0, pos_all = 0.0, neg_c = 0.0, pos_c = 0.0;
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
      int j = static_cast<int>(it.col());
      double a = it.value();
      if (j == i) {
        diag = a;
        continue;
      }
      if (a < 0.0) {
        neg_all += a;
        if (strong_c[j]) neg_c += a;
      } else {
        pos_all += a;
        if (strong_c[j]) pos_c += a;
      }
    }
    if (pos_c == 0.0) diag += pos_all;
    double alpha = neg_c != 0.0 ? neg_all / neg_c : 0.0;
    double beta = pos_c != 0.0 ? pos_all / pos_c : 0.0;
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
      int j = static_cast<int>(it.col());
      if (j == i || !strong_c[j]) continue;
      double a = it.value();
      double w = a < 0.0 ? -alpha * a / diag : -beta * a / diag;
      if (w != 0.0) trip.emplace_back(i, coarse_index[j], w);
    }
    for (int j : st.S[i]) strong_c[j] = 0;
  }
  SparseMatrix P(n, num_coarse);
  P.setFromTriplets(trip.begin(), trip.end());
  return P;
}

bool extract_diagonal(const SparseMatrix& A, Eigen::VectorXd& diag) {
  diag = A.diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i)
    if (!(std::abs(diag[i]) > 0.0) || !std::isfinite(diag[i])) return false;
  return true;
}

}  // namespace

void gauss_seidel_forward(const SparseMatrix& A, const Eigen::VectorXd& diag, const Eigen::VectorXd& b,
                          Eigen::VectorXd& x) {
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    double sum = b[i];
    for (SparseMatrix::InnerIterator it(A, i); it; ++it)
      if (it.col() != i) sum -= it.value() * x[it.col()];
    x[i] = sum / diag[i];
  }
}

void gauss_seidel_backward(const SparseMatrix& A, const Eigen::VectorXd& diag, const Eigen::VectorXd& b,
                           Eigen::VectorXd& x) {
  for (Eigen::Index i = A.rows() - 1; i >= 0; --i) {
    double sum = b[i];
    for (SparseMatrix::InnerIterator it(A, i); it; ++it)
      if (it.col() != i) sum -= it.value() * x[it.col()];
    x[i] = sum / diag[i];
  }
}

AmgHierarchy amg_setup(const SparseMatrix& A, double theta, int max_levels, int coarse_size) {
  AmgHierarchy h;
  if (A.rows() != A.cols() || A.rows() == 0) {
    h.failure_ = "matrix must be square and non-empty";
    return h;
  }
  AmgLevel fine;
  fine.A = A;
  fine.A.makeCompressed();
  if (!extract_diagonal(fine.A, fine.diag)) {
    h.failure_ = "zero diagonal entry on level 0";
    return h;
  }
  h.levels_.push_back(std::move(fine));

  while (static_cast<int>(h.levels_.size()) < max_levels) {
    AmgLevel& cur = h.levels_.back();
    const int n = static_cast<int>(cur.A.rows());
    if (n <= coarse_size) break;
    Strength st = strength_of_connection(cur.A, theta);
    auto state = rs_splitting(st);
    int nc = 0;
    SparseMatrix P = direct_interpolation(cur.A, st, state, nc);
    if (nc == 0 || nc >= n) break;
    AmgLevel next;
    cur.P = P;
    cur.R = P.transpose();
    next.A = SparseMatrix(cur.R * cur.A * cur.P);
    next.A.makeCompressed();
    if (!extract_diagonal(next.A, next.diag)) {
      h.failure_ = "zero diagonal entry on level " + std::to_string(h.levels_.size());
      return h;
    }
    h.levels_.push_back(std::move(next));
  }

  const AmgLevel& coarsest = h.levels_.back();
  if (coarsest.A.rows() <= std::max(coarse_size, 64)) {
    h.coarse_lu_.compute(Eigen::MatrixXd(coarsest.A));
    if (!h.coarse_lu_.isInvertible()) {
      h.failure_ = "singular coarsest-level operator";
      return h;
    }
    h.coarse_direct_ = true;
  } else {
    h.coarse_direct_ = false;
  }
  h.ok_ = true;
  return h;
}

void AmgHierarchy::cycle(int level, const Eigen::VectorXd& b, Eigen::VectorXd& x) const {
  const AmgLevel& L = levels_[level];
  if (level + 1 == num_levels()) {
    if (coarse_direct_) {
      x = coarse_lu_.solve(b);
    } else {
      for (int k = 0; k < 10; ++k) {
        gauss_seidel_forward(L.A, L.diag, b, x);
        gauss_seidel_backward(L.A, L.diag, b, x);
      }
    }
    return;
  }
  gauss_seidel_forward(L.A, L.diag, b, x);
  Eigen::VectorXd r = b - L.A * x;
  Eigen::VectorXd rc = L.R * r;
  Eigen::VectorXd ec = Eigen::VectorXd::Zero(rc.size());
  cycle(level + 1, rc, ec);
  x += L.P * ec;
  gauss_seidel_backward(L.A, L.diag, b, x);
}

void AmgHierarchy::vcycle(const Eigen::VectorXd& b, Eigen::VectorXd& x) const {
  if (x.size() != b.size()) x = Eigen::VectorXd::Zero(b.size());
  cycle(0, b, x);
}

Preconditioner AmgHierarchy::preconditioner() const {
  return [this](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
    z = Eigen::VectorXd::Zero(r.size());
    cycle(0, r, z);
  };
}

}  // namespace castfv
