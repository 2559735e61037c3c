#include "simplex.hpp"

#include <cmath>
#include <limits>

namespace mcov::detail {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-12;
constexpr int kDegenerateSwitch = 50;

}  // namespace

Phase1Result phase1_simplex(const Eigen::MatrixXd& A_in, const Eigen::VectorXd& b_in, int max_iterations) {
  const int m = static_cast<int>(A_in.rows());
  const int K = static_cast<int>(A_in.cols());
  const int cols = K + m;
  if (max_iterations <= 0) max_iterations = 50 * (cols + m) + 1000;

  Eigen::VectorXd sign = Eigen::VectorXd::Ones(m);
  for (int i = 0; i < m; ++i)
    if (b_in(i) < 0) sign(i) = -1.0;

  // rows 0..m-1 constraints, row m reduced costs; last column is the right-hand side
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, cols + 1);
  for (int i = 0; i < m; ++i) {
    T.row(i).head(K) = sign(i) * A_in.row(i);
    T(i, K + i) = 1.0;
    T(i, cols) = sign(i) * b_in(i);
  }
  for (int i = 0; i < m; ++i) T.row(m) -= T.row(i);
  for (int i = 0; i < m; ++i) T(m, K + i) = 0.0;

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = K + i;

  Phase1Result res;
  int degenerate_run = 0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    const bool bland = degenerate_run > kDegenerateSwitch;
    int enter = -1;
    double best = -kCostTol;
    for (int j = 0; j < cols; ++j) {
      const double dj = T(m, j);
      if (dj < best) {
        enter = j;
        if (bland) break;
        best = dj;
      }
    }
    if (enter < 0) {
      res.converged = true;
      break;
    }
    int leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    double pivot = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a <= kPivotTol) continue;
      const double r = std::max(T(i, cols), 0.0) / a;
      const bool tie = std::abs(r - ratio) <= 1e-13 * (1.0 + std::abs(ratio));
      if (r < ratio && !tie) {
        ratio = r, leave = i, pivot = a;
      } else if (tie) {
        if (bland ? basis[i] < basis[leave] : a > pivot) ratio = std::min(ratio, r), leave = i, pivot = a;
      }
    }
    if (leave < 0) {
      // phase 1 is bounded below by zero, so an unbounded ray means numerical trouble
      break;
    }
    degenerate_run = ratio <= 1e-14 ? degenerate_run + 1 : 0;
    T.row(leave) /= T(leave, enter);
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = T(i, enter);
      if (f != 0.0) T.row(i) -= f * T.row(leave);
    }
    basis[leave] = enter;
  }
  res.iterations = it;

  // Recompute primal and dual values from the original data at the final basis.
  Eigen::MatrixXd B(m, m);
  Eigen::VectorXd cB(m);
  for (int i = 0; i < m; ++i) {
    const int j = basis[i];
    if (j < K) {
      B.col(i) = sign.cwiseProduct(A_in.col(j));
      cB(i) = 0.0;
    } else {
      B.col(i) = Eigen::VectorXd::Unit(m, j - K);
      cB(i) = 1.0;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  const Eigen::VectorXd bs = sign.cwiseProduct(b_in);
  Eigen::VectorXd xB = lu.solve(bs);
  Eigen::VectorXd ys = lu.transpose().solve(cB);
  if (!xB.allFinite() || !ys.allFinite()) {
    xB = T.col(cols).head(m);
    ys = Eigen::VectorXd::Ones(m) - T.row(m).segment(K, m).transpose();
  }

  res.x = Eigen::VectorXd::Zero(K);
  res.objective = 0.0;
  for (int i = 0; i < m; ++i) {
    const double v = std::max(xB(i), 0.0);
    if (basis[i] < K)
      res.x(basis[i]) = v;
    else
      res.objective += v;
  }
  res.y = sign.cwiseProduct(ys);
  return res;
}

}  // namespace mcov::detail
