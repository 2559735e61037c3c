#pragma once

#include "mcov/core.hpp"

#include <vector>

namespace mcov {

// M with M_kk = 1, M_{k+1,k} = 1, M_{1,n} = -1 (coefficient of <X_j Y_k> at (j,k)).
Mat chain_coupling(int n);
// [[0, M/2], [M^T/2, 0]] on the (X block, Y block) ordering.
Mat chain_matrix(int n);

struct GStar {
  double closed_form = 0.0;  // -cos(pi / 2n)
  double eigen_min = 0.0;    // lambda_min of the chain matrix
  bool certified = false;    // |closed_form - eigen_min| <= 1e-9
};
GStar g_star(int n);

// G'_ii = 2, G'_{i,i+1} += 1, G'_{1,n} += -1, i.e. G' = M^T M.
Mat circulant_matrix(int n);

struct CirculantSpectrum {
  std::vector<double> eigenvalues;  // 2(1 + cos((2l+1) pi / n)), l = 0..n-1
  Mat top_space;                    // n x 2 orthonormal basis of W (n x n when n = 2)
  double top_eigenvalue = 0.0;
};
CirculantSpectrum circulant_eigs(int n);

struct GTwoBrute {
  double value = 0.0;
  std::vector<int> pattern;  // lexicographically first optimal {-1,0,1} pattern
  int zeros = 0;
};

double g_two(int n);
GTwoBrute g_two_brute(int n);
GTwoBrute g_two_brute_serial(int n);

struct QuantumChainModel {
  int n = 0;
  std::vector<double> psi;  // Alice angles
  std::vector<double> phi;  // Bob angles
  Mat correlator;           // <x_j y_k> - <x_j><y_k> on the singlet, per microscopic pair
  Mat covariance;           // aggregated 2n x 2n macroscopic covariance, unit trace
  double value = 0.0;       // tr(chain_matrix * covariance)
  double normalization = 0.0;
};
QuantumChainModel quantum_chain_model(int n);
double quantum_chain_value(int n);

struct ImpossibilityBound {
  bool hypothesis_ok = false;  // d(d-1)/2 + 3 <= ceil(n/2)
  double distance_bound = 0.0;  // (4/n) sin^2(pi/2n) sin^2(pi/n)
};
ImpossibilityBound impossibility_bound(int n, int d);
// min over unit u in W of ||w/|w| - u||^2
double distance_to_top_space(const Vec& w);

struct HopeResult {
  bool satisfied = false;
  double margin = 0.0;
};
HopeResult hope_check(double xA_variance, const Mat& y_cov, const Vec& cross, double slack = 0.0);
// w^A = 1, w^B_k = sqrt(3/(4^n-1)) 2^{k-1}; returns the (n+1) x (n+1) matrix w w^T.
Mat hope_violating_matrix(int n);

struct ChainReport {
  int n = 0;
  int d = 2;
  double g_star = 0.0;
  double g_two = 0.0;
  double solver_min = 0.0;
  double quantum_value = 0.0;
  double gap = 0.0;  // g_two - g_star
  bool star_equals_two = false;
  bool has_brute = false;
  double g_two_brute = 0.0;
  int brute_zeros = 0;
  double circulant_max_error = 0.0;
  ImpossibilityBound impossibility;
};
ChainReport chain_report(int n, int d = 2);

}  // namespace mcov
