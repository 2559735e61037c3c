#include "mcov/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcov {

namespace {

void require_n(int n) {
  if (n < 2) throw PreconditionError("chain functions need n >= 2");
}

}  // namespace

Mat chain_coupling(int n) {
  require_n(n);
  Mat M = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) M(k, k) += 1.0;
  for (int k = 0; k + 1 < n; ++k) M(k + 1, k) += 1.0;
  M(0, n - 1) += -1.0;
  return M;
}

Mat chain_matrix(int n) {
  const Mat M = chain_coupling(n);
  Mat G = Mat::Zero(2 * n, 2 * n);
  G.topRightCorner(n, n) = 0.5 * M;
  G.bottomLeftCorner(n, n) = 0.5 * M.transpose();
  return G;
}

GStar g_star(int n) {
  require_n(n);
  GStar g;
  g.closed_form = -std::cos(M_PI / (2.0 * n));
  Eigen::SelfAdjointEigenSolver<Mat> es(chain_matrix(n), Eigen::EigenvaluesOnly);
  g.eigen_min = es.eigenvalues()(0);
  g.certified = std::abs(g.closed_form - g.eigen_min) <= 1e-9;
  return g;
}

Mat circulant_matrix(int n) {
  require_n(n);
  // quadratic form sum_{k>=2} (w_k + w_{k-1})^2 + (w_1 - w_n)^2, accumulated entry by entry
  Mat G = Mat::Zero(n, n);
  auto add_square = [&](int i, int j, double sj) {
    G(i, i) += 1.0;
    G(j, j) += 1.0;
    G(i, j) += sj;
    G(j, i) += sj;
  };
  for (int k = 1; k < n; ++k) add_square(k, k - 1, 1.0);
  add_square(0, n - 1, -1.0);
  return G;
}

CirculantSpectrum circulant_eigs(int n) {
  require_n(n);
  CirculantSpectrum s;
  for (int l = 0; l < n; ++l) s.eigenvalues.push_back(2.0 * (1.0 + std::cos((2.0 * l + 1.0) * M_PI / n)));
  s.top_eigenvalue = 2.0 * (1.0 + std::cos(M_PI / n));
  s.top_space = Mat(n, 2);
  const double a = std::sqrt(2.0 / n);
  for (int k = 1; k <= n; ++k) {
    s.top_space(k - 1, 0) = a * std::sin(k * M_PI / n);
    s.top_space(k - 1, 1) = a * std::cos(k * M_PI / n);
  }
  return s;
}

double g_two(int n) {
  require_n(n);
  return -std::sqrt(1.0 - 1.0 / (2.0 * (n - 1)));
}

namespace {

double pattern_value(long idx, int n, const Mat& Gp, std::vector<int>& w) {
  w.resize(n);
  for (int i = n; i-- > 0;) {
    w[i] = static_cast<int>(idx % 3) - 1;
    idx /= 3;
  }
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    den += w[i] * w[i];
    for (int j = 0; j < n; ++j) num += w[i] * Gp(i, j) * w[j];
  }
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return -0.5 * std::sqrt(std::max(num / den, 0.0));
}

GTwoBrute finish(const std::vector<double>& vals, int n, const Mat& Gp) {
  long best = -1;
  for (long k = 0; k < static_cast<long>(vals.size()); ++k)
    if (best < 0 || vals[k] < vals[best]) best = k;
  GTwoBrute r;
  r.value = vals[best];
  pattern_value(best, n, Gp, r.pattern);
  r.zeros = static_cast<int>(std::count(r.pattern.begin(), r.pattern.end(), 0));
  return r;
}

long pattern_count(int n) {
  if (n > 16) throw PreconditionError("g_two brute force limited to n <= 16");
  long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  return total;
}

}  // namespace

GTwoBrute g_two_brute_serial(int n) {
  require_n(n);
  const Mat Gp = circulant_matrix(n);
  const long total = pattern_count(n);
  std::vector<double> vals(total);
  std::vector<int> w;
  for (long k = 0; k < total; ++k) vals[k] = pattern_value(k, n, Gp, w);
  return finish(vals, n, Gp);
}

GTwoBrute g_two_brute(int n) {
  require_n(n);
  const Mat Gp = circulant_matrix(n);
  const long total = pattern_count(n);
  std::vector<double> vals(total);
#pragma omp parallel
  {
    std::vector<int> w;
#pragma omp for schedule(static)
    for (long k = 0; k < total; ++k) vals[k] = pattern_value(k, n, Gp, w);
  }
  return finish(vals, n, Gp);
}

QuantumChainModel quantum_chain_model(int n) {
  require_n(n);
  QuantumChainModel q;
  q.n = n;
  for (int k = 1; k <= n; ++k) {
    q.psi.push_back((k - 1) * M_PI / n);
    q.phi.push_back((2.0 * k - 1.0) * M_PI / (2.0 * n));
  }
  Mat sx(2, 2), sz(2, 2), I2 = Mat::Identity(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  Vec singlet = Vec::Zero(4);
  singlet(1) = 1.0 / std::sqrt(2.0);
  singlet(2) = -1.0 / std::sqrt(2.0);
  auto kron = [](const Mat& a, const Mat& b) {
    Mat k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
  };
  auto expect = [&](const Mat& op) { return singlet.dot(op * singlet); };
  auto meas = [&](double angle) { return Mat(std::cos(angle) * sx + std::sin(angle) * sz); };

  q.correlator = Mat(n, n);
  std::vector<double> var_x(n), var_y(n);
  for (int j = 0; j < n; ++j) {
    const Mat x = meas(q.psi[j]);
    const double mx = expect(kron(x, I2));
    var_x[j] = expect(kron(x * x, I2)) - mx * mx;
    for (int k = 0; k < n; ++k) {
      const Mat y = meas(q.phi[k]);
      const double my = expect(kron(I2, y));
      q.correlator(j, k) = expect(kron(x, y)) - mx * my;
    }
  }
  for (int k = 0; k < n; ++k) {
    const Mat y = meas(q.phi[k]);
    const double my = expect(kron(I2, y));
    var_y[k] = expect(kron(I2, y * y)) - my * my;
  }

  // outcomes +-1/(2n); N pairs contribute N/(4n^2) times the +-1 moments
  const double value_scale = 1.0 / (4.0 * n * n);
  double per_pair_trace = 0.0;
  for (int k = 0; k < n; ++k) per_pair_trace += value_scale * (var_x[k] + var_y[k]);
  const double pairs = 1.0 / per_pair_trace;
  // same-party entries use the symmetrized product, which keeps the matrix a Gram matrix
  std::vector<Mat> ops;
  for (int j = 0; j < n; ++j) ops.push_back(kron(meas(q.psi[j]), I2));
  for (int k = 0; k < n; ++k) ops.push_back(kron(I2, meas(q.phi[k])));
  q.covariance = Mat::Zero(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a)
    for (int b = a; b < 2 * n; ++b) {
      const double ma = expect(ops[a]), mb = expect(ops[b]);
      const double m2 = 0.5 * expect(Mat(ops[a] * ops[b] + ops[b] * ops[a])) - ma * mb;
      q.covariance(a, b) = q.covariance(b, a) = pairs * value_scale * m2;
    }
  q.normalization = q.covariance.trace();
  q.value = (chain_matrix(n) * q.covariance).trace();
  return q;
}

double quantum_chain_value(int n) { return quantum_chain_model(n).value; }

ImpossibilityBound impossibility_bound(int n, int d) {
  require_n(n);
  if (d < 2) throw PreconditionError("impossibility_bound needs d >= 2");
  ImpossibilityBound b;
  b.hypothesis_ok = d * (d - 1) / 2 + 3 <= (n + 1) / 2;
  const double s1 = std::sin(M_PI / (2.0 * n)), s2 = std::sin(M_PI / n);
  b.distance_bound = 4.0 / n * s1 * s1 * s2 * s2;
  return b;
}

double distance_to_top_space(const Vec& w) {
  const int n = static_cast<int>(w.size());
  const double nrm = w.norm();
  if (nrm == 0.0) throw PreconditionError("distance_to_top_space needs a nonzero vector");
  const Mat Q = circulant_eigs(n).top_space;
  const Vec proj = Q * (Q.transpose() * (w / nrm));
  return 2.0 - 2.0 * proj.norm();
}

HopeResult hope_check(double xA_variance, const Mat& y_cov, const Vec& cross, double slack) {
  const int n = static_cast<int>(y_cov.rows());
  if (y_cov.cols() != n || cross.size() != n || n < 1) throw StructuralError("hope_check dimension mismatch");
  const double c = 0.5 * std::sqrt((std::pow(4.0, n) - 1.0) / 3.0 - 1.0 / n);
  double lin = 0.0;
  for (int k = 0; k < n; ++k) lin += std::pow(2.0, k) * cross(k);
  HopeResult r;
  r.margin = c * (xA_variance + y_cov.trace()) - lin;
  r.satisfied = r.margin >= -slack;
  return r;
}

Mat hope_violating_matrix(int n) {
  if (n < 1) throw PreconditionError("hope_violating_matrix needs n >= 1");
  Vec w(n + 1);
  w(0) = 1.0;
  const double s = std::sqrt(3.0 / (std::pow(4.0, n) - 1.0));
  for (int k = 0; k < n; ++k) w(k + 1) = s * std::pow(2.0, k);
  return w * w.transpose();
}

ChainReport chain_report(int n, int d) {
  require_n(n);
  ChainReport r;
  r.n = n;
  r.d = d;
  const GStar gs = g_star(n);
  r.g_star = gs.closed_form;
  r.solver_min = gs.eigen_min;
  r.g_two = g_two(n);
  r.quantum_value = quantum_chain_value(n);
  r.gap = r.g_two - r.g_star;
  r.star_equals_two = std::abs(r.gap) <= 1e-12;
  if (n <= 10) {
    const GTwoBrute b = g_two_brute(n);
    r.has_brute = true;
    r.g_two_brute = b.value;
    r.brute_zeros = b.zeros;
  }
  const CirculantSpectrum cs = circulant_eigs(n);
  std::vector<double> analytic = cs.eigenvalues;
  std::sort(analytic.begin(), analytic.end());
  Eigen::SelfAdjointEigenSolver<Mat> es(circulant_matrix(n), Eigen::EigenvaluesOnly);
  for (int k = 0; k < n; ++k) r.circulant_max_error = std::max(r.circulant_max_error, std::abs(analytic[k] - es.eigenvalues()(k)));
  r.impossibility = impossibility_bound(n, d);
  return r;
}

}  // namespace mcov
