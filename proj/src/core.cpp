#include "mcov/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace mcov {

void Spectrum::validate() const {
  if (sites.empty()) throw ValidationError("spectrum has no sites");
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const auto& s = sites[k];
    if (s.empty()) throw ValidationError("spectrum site " + std::to_string(k) + " is empty");
    for (std::size_t a = 0; a < s.size(); ++a) {
      if (!std::isfinite(s[a]))
        throw ValidationError("spectrum site " + std::to_string(k) + " has a non-finite value");
      if (a > 0 && !(s[a - 1] < s[a])) {
        if (s[a - 1] == s[a])
          throw ValidationError("spectrum site " + std::to_string(k) + " has duplicate values");
        throw ValidationError("spectrum site " + std::to_string(k) + " is not sorted ascending");
      }
    }
  }
  if (identical) {
    for (std::size_t k = 1; k < sites.size(); ++k)
      if (sites[k] != sites[0])
        throw ValidationError("spectrum flagged identical but site " + std::to_string(k) + " differs");
  }
}

Spectrum Spectrum::uniform(int n, std::vector<double> values) {
  Spectrum s;
  s.sites.assign(n, std::move(values));
  s.identical = true;
  s.validate();
  return s;
}

Spectrum Spectrum::equally_spaced(int n, int d) {
  if (d < 1) throw PreconditionError("equally spaced spectrum needs d >= 1");
  std::vector<double> v(d);
  std::iota(v.begin(), v.end(), 1.0);
  Spectrum s = uniform(n, std::move(v));
  s.truncation = Truncation{"equally_spaced", 1.0, 1, d};
  return s;
}

Spectrum Spectrum::geometric(int n, double mu, long a_min, long a_max) {
  if (!(mu > 1.0)) throw PreconditionError("geometric spectrum needs mu > 1");
  if (a_max < a_min) throw PreconditionError("geometric spectrum needs a_min <= a_max");
  std::vector<double> v;
  for (long a = a_min; a <= a_max; ++a) v.push_back(std::pow(mu, static_cast<double>(a)));
  Spectrum s = uniform(n, std::move(v));
  s.truncation = Truncation{"geometric", mu, a_min, a_max};
  return s;
}

CovMatrix::CovMatrix(int n) : n_(n), upper_(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0) {
  if (n < 0) throw StructuralError("negative matrix dimension");
}

std::size_t CovMatrix::index(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n_) throw StructuralError("CovMatrix index out of range");
  // row-major packed upper triangle
  return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i - 1) / 2 + (j - i);
}

CovMatrix CovMatrix::from_dense(const Mat& m, double max_asymmetry) {
  if (m.rows() != m.cols()) throw ValidationError("covariance matrix is not square");
  if (!m.allFinite()) throw ValidationError("covariance matrix has non-finite entries");
  const int n = static_cast<int>(m.rows());
  CovMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > max_asymmetry)
        throw ValidationError("covariance matrix is not symmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      out.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    }
  return out;
}

Mat CovMatrix::dense() const {
  Mat m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) m(i, j) = m(j, i) = (*this)(i, j);
  return m;
}

double CovMatrix::frobenius() const { return dense().norm(); }

double CovMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

PsdStatus CovMatrix::psd_status(const Tolerances& tol) const {
  PsdStatus st;
  if (n_ == 0) return st;
  Eigen::SelfAdjointEigenSolver<Mat> es(dense(), Eigen::EigenvaluesOnly);
  st.min_eigenvalue = es.eigenvalues()(0);
  st.psd = st.min_eigenvalue >= -tol.psd * (1.0 + frobenius());
  return st;
}

std::size_t table_size(const std::vector<int>& dims) {
  std::size_t total = 1;
  for (int d : dims) {
    if (d < 1) throw StructuralError("outcome count must be positive");
    total *= static_cast<std::size_t>(d);
    if (total > kMaxTableSize) throw StructuralError("joint table exceeds 1e7 cells");
  }
  return total;
}

void decode_index(std::size_t flat, const std::vector<int>& dims, std::vector<int>& out) {
  out.resize(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = static_cast<int>(flat % dims[k]);
    flat /= dims[k];
  }
}

namespace {

std::vector<int> site_dims(const Spectrum& s) {
  std::vector<int> dims(s.sites.size());
  for (std::size_t k = 0; k < dims.size(); ++k) dims[k] = static_cast<int>(s.sites[k].size());
  return dims;
}

}  // namespace

void MicroModel::validate() const {
  if (tuples.empty()) return;
  const int n = tuples.front().spectrum.n();
  for (std::size_t l = 0; l < tuples.size(); ++l) {
    const Tuple& t = tuples[l];
    const std::string tag = "tuple " + std::to_string(l);
    if (t.spectrum.n() != n) throw StructuralError(tag + ": site count differs from first tuple");
    t.spectrum.validate();
    if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) throw ValidationError(tag + ": negative weight");
    if (!(t.nu > 0.0 && t.nu <= 1.0)) throw ValidationError(tag + ": nu outside (0,1]");
    if (t.joint.size() != table_size(site_dims(t.spectrum)))
      throw StructuralError(tag + ": joint table size does not match spectrum");
    double sum = 0.0;
    for (double p : t.joint) {
      if (!(p >= 0.0)) throw ValidationError(tag + ": negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError(tag + ": joint table does not sum to 1");
  }
}

CovMatrix covariance_of_model(const MicroModel& model) {
  model.validate();
  const int n = model.n();
  Mat gamma = Mat::Zero(n, n);
  std::vector<int> idx;
  for (const Tuple& t : model.tuples) {
    const std::vector<int> dims = site_dims(t.spectrum);
    Vec first = Vec::Zero(n);
    Mat second = Mat::Zero(n, n);
    Vec x(n);
    for (std::size_t f = 0; f < t.joint.size(); ++f) {
      const double p = t.joint[f];
      if (p == 0.0) continue;
      decode_index(f, dims, idx);
      for (int i = 0; i < n; ++i) x(i) = t.spectrum.sites[i][idx[i]];
      first += p * x;
      second.noalias() += p * x * x.transpose();
    }
    gamma += t.weight * (t.nu * second - t.nu * t.nu * first * first.transpose());
  }
  return CovMatrix::from_dense(0.5 * (gamma + gamma.transpose()), 0.0);
}

NakedCov naked_covariance(const std::vector<double>& joint, int n, int d) {
  const std::vector<int> dims(n, d);
  if (joint.size() != table_size(dims)) throw StructuralError("joint table size is not d^n");
  const int m = n * d;
  Vec marg = Vec::Zero(m);
  Mat pair = Mat::Zero(m, m);
  std::vector<int> idx;
  for (std::size_t f = 0; f < joint.size(); ++f) {
    const double p = joint[f];
    if (p == 0.0) continue;
    decode_index(f, dims, idx);
    for (int i = 0; i < n; ++i) {
      const int r = i * d + idx[i];
      marg(r) += p;
      for (int j = 0; j < n; ++j) pair(r, j * d + idx[j]) += p;
    }
  }
  // The diagonal blocks already follow p_ii(a,a') = delta_{aa'} p_i(a): a single
  // outcome per site per cell only hits the (a,a) entry.
  NakedCov out{n, d, pair - marg * marg.transpose()};
  return out;
}

NakedCov naked_generator(const std::vector<int>& c, const std::vector<int>& cp, int n, int d) {
  if (static_cast<int>(c.size()) != n || static_cast<int>(cp.size()) != n)
    throw StructuralError("outcome lists must have n entries");
  Vec e = Vec::Zero(n * d), f = Vec::Zero(n * d);
  for (int i = 0; i < n; ++i) {
    if (c[i] < 1 || c[i] > d || cp[i] < 1 || cp[i] > d) throw StructuralError("outcome index out of range");
    e(i * d + c[i] - 1) = 1.0;
    f(i * d + cp[i] - 1) = 1.0;
  }
  Mat g = 0.5 * (e * e.transpose() + f * f.transpose()) - 0.25 * (e + f) * (e + f).transpose();
  return NakedCov{n, d, g};
}

Vec dressed_generator(const Spectrum& spectrum, const std::vector<int>& c, const std::vector<int>& cp) {
  const int n = spectrum.n();
  if (static_cast<int>(c.size()) != n || static_cast<int>(cp.size()) != n)
    throw StructuralError("outcome lists must have n entries");
  Vec w(n);
  for (int i = 0; i < n; ++i) {
    const int d = spectrum.size(i);
    if (c[i] < 1 || c[i] > d || cp[i] < 1 || cp[i] > d) throw StructuralError("outcome index out of range");
    w(i) = spectrum.sites[i][c[i] - 1] - spectrum.sites[i][cp[i] - 1];
  }
  return w;
}

void DetectorBank::validate() const {
  if (mean.size() != second.size()) throw StructuralError("detector bank site count mismatch");
  for (std::size_t k = 0; k < mean.size(); ++k) {
    if (mean[k].size() != second[k].size()) throw StructuralError("detector bank state count mismatch");
    for (std::size_t a = 0; a < mean[k].size(); ++a) {
      const double m = mean[k][a], s = second[k][a];
      if (!std::isfinite(m) || !std::isfinite(s)) throw ValidationError("detector bank has non-finite moments");
      // relative slack for rounding in the moment pair
      if (s < m * m - 1e-12 * (1.0 + m * m))
        throw ValidationError("detector moment inequality violated at site " + std::to_string(k) +
                              ", state " + std::to_string(a + 1));
    }
  }
}

DetectorReduction detector_reduction(const DetectorBank& bank, const MicroModel& model) {
  bank.validate();
  model.validate();
  const int n = model.n();
  if (static_cast<int>(bank.mean.size()) != n) throw StructuralError("detector bank has wrong site count");

  // Deterministic spectrum: sorted distinct means; states with equal means merge.
  std::vector<std::vector<double>> values(n);
  std::vector<std::vector<int>> state_to_value(n);
  for (int k = 0; k < n; ++k) {
    std::vector<double> v = bank.mean[k];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    values[k] = v;
    for (double m : bank.mean[k])
      state_to_value[k].push_back(static_cast<int>(std::lower_bound(v.begin(), v.end(), m) - v.begin()));
  }

  DetectorReduction out;
  out.spectrum.sites = values;
  out.spectrum.identical =
      std::all_of(values.begin(), values.end(), [&](const auto& s) { return s == values.front(); });
  out.K = Vec::Zero(n);

  std::vector<int> new_dims(n);
  for (int k = 0; k < n; ++k) new_dims[k] = static_cast<int>(values[k].size());
  const std::size_t new_size = table_size(new_dims);

  std::vector<int> idx;
  for (const Tuple& t : model.tuples) {
    const std::vector<int> dims = site_dims(t.spectrum);
    for (int k = 0; k < n; ++k)
      if (dims[k] != static_cast<int>(bank.mean[k].size()))
        throw StructuralError("detector bank state count differs from model at site " + std::to_string(k));

    Tuple det;
    det.weight = t.weight;
    det.nu = t.nu;
    det.spectrum = out.spectrum;
    det.joint.assign(new_size, 0.0);
    Vec var_mass = Vec::Zero(n);
    for (std::size_t f = 0; f < t.joint.size(); ++f) {
      const double p = t.joint[f];
      if (p == 0.0) continue;
      decode_index(f, dims, idx);
      std::size_t g = 0;
      for (int k = 0; k < n; ++k) {
        g = g * new_dims[k] + state_to_value[k][idx[k]];
        const double m = bank.mean[k][idx[k]];
        var_mass(k) += p * (bank.second[k][idx[k]] - m * m);
      }
      det.joint[g] += p;
    }
    out.K += t.weight * t.nu * var_mass;
    out.deterministic.tuples.push_back(std::move(det));
  }
  return out;
}

}  // namespace mcov
