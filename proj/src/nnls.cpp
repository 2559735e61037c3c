#include "nnls.hpp"

#include <vector>

namespace mcov::detail {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const std::vector<int>& passive) {
  Eigen::MatrixXd Ap(A.rows(), passive.size());
  for (std::size_t k = 0; k < passive.size(); ++k) Ap.col(k) = A.col(passive[k]);
  return Ap.colPivHouseholderQr().solve(b);
}

}  // namespace

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iterations) {
  const int n = static_cast<int>(A.cols());
  if (max_iterations <= 0) max_iterations = 3 * n + 30;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<char> in_passive(n, 0);
  const double tol = 1e-13 * (1.0 + A.norm() * (1.0 + b.norm()));

  for (int outer = 0; outer < max_iterations; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    int t = -1;
    double best = tol;
    for (int j = 0; j < n; ++j)
      if (!in_passive[j] && w(j) > best) best = w(j), t = j;
    if (t < 0) break;
    in_passive[t] = 1;

    for (int inner = 0; inner <= n; ++inner) {
      std::vector<int> passive;
      for (int j = 0; j < n; ++j)
        if (in_passive[j]) passive.push_back(j);
      const Eigen::VectorXd z = solve_passive(A, b, passive);
      bool feasible = true;
      for (Eigen::Index k = 0; k < z.size(); ++k)
        if (z(k) <= 0.0) feasible = false;
      if (feasible) {
        x.setZero();
        for (std::size_t k = 0; k < passive.size(); ++k) x(passive[k]) = z(k);
        break;
      }
      double alpha = 1.0;
      for (std::size_t k = 0; k < passive.size(); ++k) {
        const int j = passive[k];
        if (z(k) <= 0.0) {
          const double denom = x(j) - z(k);
          if (denom > 0.0) alpha = std::min(alpha, x(j) / denom);
        }
      }
      for (std::size_t k = 0; k < passive.size(); ++k) {
        const int j = passive[k];
        x(j) += alpha * (z(k) - x(j));
        if (x(j) <= 1e-15 * (1.0 + std::abs(z(k)))) {
          x(j) = 0.0;
          in_passive[j] = 0;
        }
      }
    }
  }
  return x;
}

}  // namespace mcov::detail
