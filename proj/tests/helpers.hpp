#pragma once

#include "mcov/core.hpp"

#include <cmath>
#include <vector>
#include <random>

namespace testing {

using mcov::Mat;
using mcov::Vec;

inline Mat random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

// Wishart-like PSD matrix, random rank up to n
inline Mat random_psd(std::mt19937_64& rng, int n) {
  const Mat a = random_matrix(rng, n, n);
  return a * a.transpose();
}

inline Mat random_symmetric(std::mt19937_64& rng, int n) {
  const Mat a = random_matrix(rng, n, n);
  return 0.5 * (a + a.transpose());
}

inline std::vector<double> random_joint(std::mt19937_64& rng, std::size_t cells) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(cells);
  double s = 0.0;
  for (auto& x : p) s += (x = e(rng));
  for (auto& x : p) x /= s;
  return p;
}

// Covariance with probabilistic detectors, integrating the response moments directly.
inline Mat probabilistic_covariance(const mcov::DetectorBank& bank, const mcov::MicroModel& model) {
  const int n = model.n();
  Mat g = Mat::Zero(n, n);
  std::vector<int> idx;
  for (const auto& t : model.tuples) {
    std::vector<int> dims(n);
    for (int k = 0; k < n; ++k) dims[k] = t.spectrum.size(k);
    Mat second = Mat::Zero(n, n);
    Vec first = Vec::Zero(n);
    for (std::size_t f = 0; f < t.joint.size(); ++f) {
      mcov::decode_index(f, dims, idx);
      const double p = t.joint[f];
      for (int i = 0; i < n; ++i) {
        first(i) += p * bank.mean[i][idx[i]];
        for (int j = 0; j < n; ++j)
          second(i, j) += p * (i == j ? bank.second[i][idx[i]] : bank.mean[i][idx[i]] * bank.mean[j][idx[j]]);
      }
    }
    g += t.weight * (t.nu * second - t.nu * t.nu * first * first.transpose());
  }
  return g;
}

inline mcov::DetectorBank random_bank(std::mt19937_64& rng, int n, int d) {
  std::uniform_real_distribution<double> u(-2.0, 2.0), v(0.0, 1.5);
  mcov::DetectorBank b;
  b.mean.resize(n);
  b.second.resize(n);
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < d; ++a) {
      const double m = u(rng);
      b.mean[k].push_back(m);
      b.second[k].push_back(m * m + v(rng));
    }
  return b;
}

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace testing
