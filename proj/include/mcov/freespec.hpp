#pragma once

#include "mcov/conic.hpp"
#include "mcov/fixedspec.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mcov {

// Dependency pattern of w(c,c') = lambda(c) - lambda(c') for generic identical outcome values:
// independent rows become unit rows, dependent rows hold their {-1,0,1} combination.
struct Pattern {
  Eigen::MatrixXi matrix;  // n x rank
  int rank = 0;
};
Pattern dependency_pattern(const std::vector<int>& c, const std::vector<int>& cp, int d);

// Candidates satisfying conditions 1-3 with N(n) = d-1 and full column rank, lexicographic order.
std::vector<Eigen::MatrixXi> condition_candidates(int n, int d);

std::vector<CanonicalP> enumerate_canonical_P(int n, int d);
std::vector<CanonicalP> enumerate_canonical_P_serial(int n, int d);

// Nonzero s in {-1,0,1}^n with s^T P = 0 when d-1 < n (empty otherwise).
Eigen::VectorXi null_sign_vector(const CanonicalP& p);

SdpCertificate membership_free(const CovMatrix& gamma, int d, const Tolerances& tol = {});

struct WitnessReport {
  Mat G;
  bool valid = false;
  double min_eigenvalue = 0.0;             // of G
  std::vector<double> block_min_eigenvalues;  // min eig(P^T G P) per P, G normalized to unit Frobenius norm
  std::optional<Mat> violating_example;    // v v^T for the most negative eigenvector of G
  double violating_value = 0.0;            // tr(G v v^T)
};

WitnessReport witness_valid(const Mat& G, int n, int d, bool want_example = false, const Tolerances& tol = {});

struct WitnessB {
  Mat B;
  double evaluate(const CovMatrix& gamma) const { return (B * gamma.dense()).trace(); }
};
WitnessB identity_witness_B(int n);

struct KRatio {
  double closed_form = 0.0;
  double solver = 0.0;
  bool agree = false;  // |closed_form - solver| <= 1e-6
};
Mat k_ratio_matrix(int n);  // G_ij = 2^{i+j-2} 3/(4^n - 1)
KRatio k_ratio(int n);

struct ContinuumBound {
  int d = 0;
  int d_bar = 0;
  double bound = 0.0;
};
ContinuumBound continuum_step_bound(int d);

// Support-direction scan of the trace-1 slice of the free-spectrum cone.
RegionPolygon region_scan_free(int n, int d, const Mat& A1, const Mat& A2, int n_dirs);

}  // namespace mcov
