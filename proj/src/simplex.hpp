#pragma once

#include <Eigen/Dense>

#include <vector>

namespace mcov::detail {

struct Phase1Result {
  bool converged = false;
  double objective = 0.0;  // sum of artificial values at the final basis
  Eigen::VectorXd x;       // structural values, clipped at zero
  Eigen::VectorXd y;       // duals: min reduced cost -y^T A_j, objective y^T b
  int iterations = 0;
};

// Phase-1 primal simplex for {x >= 0 : A x = b}, artificial start basis.
Phase1Result phase1_simplex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iterations = 0);

}  // namespace mcov::detail
