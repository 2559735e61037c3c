#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcov {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Shape or indexing mismatch between arguments.
struct StructuralError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input data violating a type invariant (unsorted spectrum, non-symmetric matrix, ...).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Operation called outside its domain (e.g. geometric ratio too small).
struct PreconditionError : std::domain_error {
  using std::domain_error::domain_error;
};

struct Tolerances {
  double residual = 1e-8;     // absolute slack for ">= 0" checks and boundary bands
  double psd = 1e-9;          // eigenvalues >= -psd * (1 + norm); witness margins
  double certificate = 1e-7;  // reconstruction residual relative to 1 + ||gamma||_F
};

struct Truncation {
  std::string family;  // "geometric", "equally_spaced", ...
  double parameter = 0.0;
  long first_index = 0;
  long last_index = 0;
};

struct Spectrum {
  std::vector<std::vector<double>> sites;
  bool identical = false;
  std::optional<Truncation> truncation;

  int n() const { return static_cast<int>(sites.size()); }
  int size(int site) const { return static_cast<int>(sites.at(site).size()); }

  // Throws ValidationError on empty, unsorted, duplicated or non-finite sites.
  void validate() const;

  static Spectrum uniform(int n, std::vector<double> values);
  // values 1..d on every site
  static Spectrum equally_spaced(int n, int d);
  // values mu^a for a in [a_min, a_max] on every site
  static Spectrum geometric(int n, double mu, long a_min, long a_max);
};

struct PsdStatus {
  double min_eigenvalue = 0.0;
  bool psd = true;
};

// Symmetric n x n matrix; only the upper triangle is stored.
class CovMatrix {
 public:
  CovMatrix() = default;
  explicit CovMatrix(int n);

  // Rejects asymmetry above max_asymmetry, then symmetrizes.
  static CovMatrix from_dense(const Mat& m, double max_asymmetry = 1e-12);

  int n() const { return n_; }
  double operator()(int i, int j) const { return upper_[index(i, j)]; }
  void set(int i, int j, double v) { upper_[index(i, j)] = v; }

  Mat dense() const;
  double frobenius() const;
  double trace() const;
  PsdStatus psd_status(const Tolerances& tol = {}) const;

 private:
  std::size_t index(int i, int j) const;

  int n_ = 0;
  std::vector<double> upper_;
};

struct Tuple {
  double weight = 1.0;   // N_l
  double nu = 1.0;       // production probability in (0, 1]
  Spectrum spectrum;
  std::vector<double> joint;  // row-major over sites, site 0 slowest
};

struct MicroModel {
  std::vector<Tuple> tuples;

  int n() const { return tuples.empty() ? 0 : tuples.front().spectrum.n(); }
  void validate() const;
};

// nd x nd matrix indexed by (site, outcome) pairs, row = site * d + (outcome - 1).
struct NakedCov {
  int n = 0;
  int d = 0;
  Mat entries;
};

struct DetectorBank {
  // mean[k][a] and second[k][a] for site k, microscopic state a (0-based storage)
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> second;

  void validate() const;
};

struct DetectorReduction {
  Spectrum spectrum;         // per-site response means (shared across tuples when identical)
  Vec K;                     // diagonal noise
  MicroModel deterministic;  // the model re-expressed with deterministic detectors
};

constexpr std::size_t kMaxTableSize = 10'000'000;

// Flat joint-table size for the given per-site outcome counts; throws beyond kMaxTableSize.
std::size_t table_size(const std::vector<int>& dims);
// Mixed-radix decoding of a flat index into 0-based per-site outcomes.
void decode_index(std::size_t flat, const std::vector<int>& dims, std::vector<int>& out);

CovMatrix covariance_of_model(const MicroModel& model);

NakedCov naked_covariance(const std::vector<double>& joint, int n, int d);

// c and cp hold 1-based outcomes.
NakedCov naked_generator(const std::vector<int>& c, const std::vector<int>& cp, int n, int d);

Vec dressed_generator(const Spectrum& spectrum, const std::vector<int>& c, const std::vector<int>& cp);

DetectorReduction detector_reduction(const DetectorBank& bank, const MicroModel& model);

}  // namespace mcov
