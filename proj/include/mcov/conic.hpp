#pragma once

#include "mcov/core.hpp"

#include <map>
#include <string>
#include <vector>

namespace mcov {

enum class Verdict { Member, NotMember, Indeterminate };

const char* to_string(Verdict v);

struct GeneratorTag {
  enum class Kind { Difference, Value };
  Kind kind = Kind::Difference;
  std::vector<int> c;   // 1-based outcomes
  std::vector<int> cp;  // empty for value vectors
};

// First nonzero entry positive, unit Euclidean norm. Returns an empty vector for w = 0.
Vec canonicalize_direction(const Vec& w, double zero_tol = 1e-14);

class GeneratorSet {
 public:
  explicit GeneratorSet(int n = 0) : n_(n) {}

  // Canonicalizes w; returns false if w is zero or already present.
  bool add(const Vec& w, GeneratorTag tag = {});

  int n() const { return n_; }
  std::size_t size() const { return dirs_.size(); }
  bool empty() const { return dirs_.empty(); }
  const std::vector<Vec>& directions() const { return dirs_; }
  const std::vector<GeneratorTag>& tags() const { return tags_; }

 private:
  int n_;
  std::vector<Vec> dirs_;
  std::vector<GeneratorTag> tags_;
  std::map<std::vector<long long>, std::size_t> index_;
};

struct ConicCertificate {
  Verdict verdict = Verdict::Indeterminate;
  Tolerances tol;
  // primal record: gamma ~ sum_k mu_k w_k w_k^T
  bool has_primal = false;
  std::vector<double> mu;
  double residual = 0.0;
  // dual record: tr(G gamma) < 0 <= w_k^T G w_k, ||G||_F = 1
  bool has_witness = false;
  Mat witness;
  double witness_margin = 0.0;
  double min_generator_value = 0.0;
  int iterations = 0;
  std::string note;
};

ConicCertificate cone_membership_lp(const CovMatrix& gamma, const GeneratorSet& gens, const Tolerances& tol = {});

struct LinearOptResult {
  double value = 0.0;
  std::size_t index = 0;
};

// max_k w_k^T A w_k / ||w_k||^2; ties resolve to the lowest index.
LinearOptResult cone_linear_opt(const Mat& A, const GeneratorSet& gens);
LinearOptResult cone_linear_opt_serial(const Mat& A, const GeneratorSet& gens);

// n x (d-1) sign pattern with a realizing pair (c, c').
struct CanonicalP {
  int n = 0;
  int d = 0;
  Eigen::MatrixXi matrix;
  std::vector<int> c;
  std::vector<int> cp;

  Mat as_double() const { return matrix.cast<double>(); }
  // Empty string when conditions 1-3, N(n) = d-1 and full column rank all hold.
  std::string check_conditions() const;
};

struct SdpCertificate {
  Verdict verdict = Verdict::Indeterminate;
  Tolerances tol;
  bool has_primal = false;
  std::vector<Mat> blocks;  // Z_P per P, (d-1) x (d-1)
  double residual = 0.0;
  bool has_witness = false;
  Mat witness;
  double witness_margin = 0.0;
  std::vector<double> block_min_eigenvalues;  // min eig(P^T G P) per P
  int iterations = 0;
  std::string note;
};

struct SdpSolverOptions {
  int max_iterations = 3000;
  double stall_ratio = 1e-13;  // stop once max_P lambda_max(P^T R P, P^T P) <= stall_ratio * ||R||
};

SdpCertificate sdp_membership(const CovMatrix& gamma, const std::vector<CanonicalP>& pset,
                              const Tolerances& tol = {}, const SdpSolverOptions& opt = {});

struct SdpOptResult {
  double value = 0.0;
  std::size_t index = 0;  // maximizing P
  Vec z;                  // maximizer with ||P z|| = 1
};

// max_P lambda_max(P^T A P, P^T P); ties resolve to the lowest P index.
SdpOptResult sdp_linear_opt(const Mat& A, const std::vector<CanonicalP>& pset);
SdpOptResult sdp_linear_opt_serial(const Mat& A, const std::vector<CanonicalP>& pset);

struct Verification {
  bool ok = true;
  std::string violated;
};

Verification verify_certificate(const ConicCertificate& cert, const CovMatrix& gamma, const GeneratorSet& gens);
Verification verify_certificate(const SdpCertificate& cert, const CovMatrix& gamma,
                                const std::vector<CanonicalP>& pset);

// Isometric upper-triangle vectorization: off-diagonal entries scaled by sqrt(2).
Vec svec(const Mat& m);
Mat smat(const Vec& v, int n);

}  // namespace mcov
