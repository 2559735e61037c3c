#include "mcov/conic.hpp"

#include "nnls.hpp"
#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mcov {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Member: return "MEMBER";
    case Verdict::NotMember: return "NOT_MEMBER";
    case Verdict::Indeterminate: return "INDETERMINATE";
  }
  return "INDETERMINATE";
}

Vec svec(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Vec v(n * (n + 1) / 2);
  int r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) v(r++) = i == j ? m(i, i) : std::sqrt(2.0) * 0.5 * (m(i, j) + m(j, i));
  return v;
}

Mat smat(const Vec& v, int n) {
  if (v.size() != n * (n + 1) / 2) throw StructuralError("smat: length is not n(n+1)/2");
  Mat m(n, n);
  int r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double x = i == j ? v(r) : v(r) / std::sqrt(2.0);
      m(i, j) = m(j, i) = x;
      ++r;
    }
  return m;
}

Vec canonicalize_direction(const Vec& w, double zero_tol) {
  const double nrm = w.norm();
  if (!(nrm > zero_tol)) return Vec();
  Vec u = w / nrm;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) > zero_tol) {
      if (u(i) < 0) u = -u;
      break;
    }
  }
  return u;
}

bool GeneratorSet::add(const Vec& w, GeneratorTag tag) {
  if (w.size() != n_) throw StructuralError("generator dimension differs from set dimension");
  Vec u = canonicalize_direction(w);
  if (u.size() == 0) return false;
  std::vector<long long> key(n_);
  for (int i = 0; i < n_; ++i) key[i] = std::llround(u(i) * 1e10);
  auto [it, inserted] = index_.emplace(std::move(key), dirs_.size());
  if (!inserted) return false;
  dirs_.push_back(std::move(u));
  tags_.push_back(std::move(tag));
  return true;
}

namespace {

Mat rank_one_sum(const std::vector<Vec>& dirs, const std::vector<double>& mu, int n) {
  Mat s = Mat::Zero(n, n);
  for (std::size_t k = 0; k < dirs.size(); ++k)
    if (mu[k] != 0.0) s.noalias() += mu[k] * dirs[k] * dirs[k].transpose();
  return s;
}

double min_generator_value(const Mat& G, const std::vector<Vec>& dirs) {
  double v = std::numeric_limits<double>::infinity();
  for (const Vec& w : dirs) v = std::min(v, w.dot(G * w) / w.squaredNorm());
  return v;
}

Verdict decide(bool member_ok, bool witness_ok, std::string& note) {
  if (member_ok && !witness_ok) return Verdict::Member;
  if (witness_ok && !member_ok) return Verdict::NotMember;
  note = member_ok ? "boundary band: both the reconstruction and the witness pass at tolerance"
                   : "neither a reconstruction nor a witness could be certified at tolerance";
  return Verdict::Indeterminate;
}

}  // namespace

ConicCertificate cone_membership_lp(const CovMatrix& gamma, const GeneratorSet& gens, const Tolerances& tol) {
  const int n = gamma.n();
  if (gens.n() != n) throw StructuralError("generator dimension differs from matrix dimension");
  ConicCertificate cert;
  cert.tol = tol;
  const Mat g = gamma.dense();
  const double gnorm = g.norm();
  const std::size_t K = gens.size();

  if (gnorm == 0.0) {
    cert.verdict = Verdict::Member;
    cert.has_primal = true;
    cert.mu.assign(K, 0.0);
    return cert;
  }

  bool member_ok = false;
  Mat G;
  if (K == 0) {
    G = -g / gnorm;
    cert.min_generator_value = 0.0;
  } else {
    const int m = n * (n + 1) / 2;
    Mat A(m, K);
    for (std::size_t k = 0; k < K; ++k) {
      const Vec& w = gens.directions()[k];
      A.col(k) = svec(w * w.transpose());
    }
    const Vec b = svec(g) / gnorm;
    const detail::Phase1Result res = detail::phase1_simplex(A, b);
    cert.iterations = res.iterations;

    cert.mu.resize(K);
    for (std::size_t k = 0; k < K; ++k) cert.mu[k] = res.x(k) * gnorm;
    cert.residual = (rank_one_sum(gens.directions(), cert.mu, n) - g).norm();
    cert.has_primal = true;
    member_ok = cert.residual <= tol.certificate * (1.0 + gnorm);

    G = -smat(res.y, n);
    const double shift = std::max(0.0, -min_generator_value(G, gens.directions()));
    G += shift * Mat::Identity(n, n);
  }

  bool witness_ok = false;
  const double gn = G.norm();
  if (gn > 0.0 && std::isfinite(gn)) {
    G /= gn;
    cert.witness = G;
    cert.has_witness = true;
    cert.witness_margin = (G * g).trace();
    if (K > 0) cert.min_generator_value = min_generator_value(G, gens.directions());
    witness_ok = cert.witness_margin <= -tol.psd && cert.min_generator_value >= -tol.psd;
  }

  cert.verdict = decide(member_ok, witness_ok, cert.note);
  return cert;
}

LinearOptResult cone_linear_opt_serial(const Mat& A, const GeneratorSet& gens) {
  if (gens.empty()) throw StructuralError("cone_linear_opt needs a nonempty generator set");
  LinearOptResult best{-std::numeric_limits<double>::infinity(), 0};
  const auto& dirs = gens.directions();
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const double v = dirs[k].dot(A * dirs[k]) / dirs[k].squaredNorm();
    if (v > best.value) best = {v, k};
  }
  return best;
}

LinearOptResult cone_linear_opt(const Mat& A, const GeneratorSet& gens) {
  if (gens.empty()) throw StructuralError("cone_linear_opt needs a nonempty generator set");
  const auto& dirs = gens.directions();
  const long K = static_cast<long>(dirs.size());
  std::vector<double> vals(K);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < K; ++k) vals[k] = dirs[k].dot(A * dirs[k]) / dirs[k].squaredNorm();
  LinearOptResult best{-std::numeric_limits<double>::infinity(), 0};
  for (long k = 0; k < K; ++k)
    if (vals[k] > best.value) best = {vals[k], static_cast<std::size_t>(k)};
  return best;
}

std::string CanonicalP::check_conditions() const {
  if (d < 2) return "d must be at least 2";
  if (matrix.rows() != n || matrix.cols() != d - 1) return "shape is not n x (d-1)";
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d - 1; ++k)
      if (std::abs(matrix(i, k)) > 1) return "entry outside {-1,0,1}";
  int N = 0;
  bool seen_nonzero = false;
  for (int i = 0; i < n; ++i) {
    int last = 0;
    for (int k = 0; k < d - 1; ++k)
      if (matrix(i, k) != 0) last = k + 1;
    if (last != 0 && !seen_nonzero) {
      seen_nonzero = true;
      for (int k = 0; k < d - 1; ++k)
        if (matrix(i, k) != (k == 0 ? 1 : 0)) return "condition 1: first nonzero row is not (1,0,...,0)";
    }
    const int next = std::max(N, last);
    if (next > N + 1) return "condition 2: running column index jumps by more than one";
    if (next == N + 1) {
      for (int k = 0; k < d - 1; ++k)
        if (matrix(i, k) != (k == next - 1 ? 1 : 0)) return "condition 3: column-opening row is not a unit row";
    }
    N = next;
  }
  if (N != d - 1) return "N(n) differs from d-1";
  Eigen::FullPivLU<Mat> lu(as_double());
  if (lu.rank() != d - 1) return "column rank below d-1";
  return {};
}

namespace {

struct PencilMax {
  double value;
  Vec z;
};

PencilMax pencil_max(const Mat& A, const Mat& P) {
  const Mat B = P.transpose() * P;
  const Mat C = P.transpose() * A * P;
  if (P.cols() == 1) {
    const double b = B(0, 0);
    Vec z(1);
    z(0) = 1.0 / std::sqrt(b);
    return {C(0, 0) / b, z};
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(C, B);
  const Eigen::Index last = es.eigenvalues().size() - 1;
  return {es.eigenvalues()(last), es.eigenvectors().col(last)};
}

void check_pset(const std::vector<CanonicalP>& pset, int n) {
  for (const CanonicalP& p : pset)
    if (p.matrix.rows() != n) throw StructuralError("P matrix row count differs from matrix dimension");
}

SdpOptResult argmax(const std::vector<PencilMax>& vals) {
  SdpOptResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < vals.size(); ++p)
    if (vals[p].value > best.value) best = {vals[p].value, p, vals[p].z};
  return best;
}

std::vector<PencilMax> pencil_all(const Mat& A, const std::vector<Mat>& Ps) {
  std::vector<PencilMax> vals(Ps.size());
  const long np = static_cast<long>(Ps.size());
#pragma omp parallel for schedule(static)
  for (long p = 0; p < np; ++p) vals[p] = pencil_max(A, Ps[p]);
  return vals;
}

std::vector<Mat> to_double(const std::vector<CanonicalP>& pset) {
  std::vector<Mat> Ps;
  Ps.reserve(pset.size());
  for (const CanonicalP& p : pset) Ps.push_back(p.as_double());
  return Ps;
}

}  // namespace

SdpOptResult sdp_linear_opt_serial(const Mat& A, const std::vector<CanonicalP>& pset) {
  if (pset.empty()) throw StructuralError("sdp_linear_opt needs a nonempty P set");
  check_pset(pset, static_cast<int>(A.rows()));
  std::vector<PencilMax> vals;
  for (const CanonicalP& p : pset) vals.push_back(pencil_max(A, p.as_double()));
  return argmax(vals);
}

SdpOptResult sdp_linear_opt(const Mat& A, const std::vector<CanonicalP>& pset) {
  if (pset.empty()) throw StructuralError("sdp_linear_opt needs a nonempty P set");
  check_pset(pset, static_cast<int>(A.rows()));
  return argmax(pencil_all(A, to_double(pset)));
}

SdpCertificate sdp_membership(const CovMatrix& gamma, const std::vector<CanonicalP>& pset, const Tolerances& tol,
                              const SdpSolverOptions& opt) {
  const int n = gamma.n();
  check_pset(pset, n);
  if (pset.empty()) throw StructuralError("sdp_membership needs a nonempty P set");
  const std::vector<Mat> Ps = to_double(pset);
  for (const Mat& P : Ps)
    if (Eigen::FullPivLU<Mat>(P).rank() != P.cols()) throw StructuralError("P matrix is rank deficient");

  SdpCertificate cert;
  cert.tol = tol;
  const Mat g = gamma.dense();
  const double gnorm = g.norm();
  cert.blocks.reserve(Ps.size());
  for (const Mat& P : Ps) cert.blocks.push_back(Mat::Zero(P.cols(), P.cols()));

  if (gnorm == 0.0) {
    cert.verdict = Verdict::Member;
    cert.has_primal = true;
    return cert;
  }

  struct Atom {
    std::size_t p;
    Vec z;
    Vec s;
  };
  std::vector<Atom> atoms;
  Vec mu;
  const Vec b = svec(g) / gnorm;
  Mat R = g / gnorm;
  double best_rnorm = R.norm();
  int since_progress = 0;

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    const double rnorm = R.norm();
    if (rnorm <= 1e-15) break;
    const std::vector<PencilMax> vals = pencil_all(R, Ps);
    double vmax = -std::numeric_limits<double>::infinity();
    for (const PencilMax& v : vals) vmax = std::max(vmax, v.value);
    if (vmax <= opt.stall_ratio * rnorm) break;

    std::vector<std::size_t> order(vals.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return vals[a].value > vals[c].value; });
    for (std::size_t r = 0; r < order.size() && r < 8; ++r) {
      const std::size_t p = order[r];
      if (vals[p].value < 0.5 * vmax) break;
      const Vec u = Ps[p] * vals[p].z;
      atoms.push_back({p, vals[p].z, svec(u * u.transpose())});
    }

    Mat A(b.size(), atoms.size());
    for (std::size_t k = 0; k < atoms.size(); ++k) A.col(k) = atoms[k].s;
    mu = detail::nnls(A, b);

    std::vector<Atom> kept;
    std::vector<double> kept_mu;
    for (std::size_t k = 0; k < atoms.size(); ++k)
      if (mu(k) > 0.0) kept.push_back(std::move(atoms[k])), kept_mu.push_back(mu(k));
    atoms = std::move(kept);
    mu = Eigen::Map<Vec>(kept_mu.data(), static_cast<Eigen::Index>(kept_mu.size()));

    Vec fit = Vec::Zero(b.size());
    for (std::size_t k = 0; k < atoms.size(); ++k) fit += mu(k) * atoms[k].s;
    R = smat(b - fit, n);

    const double now = R.norm();
    if (now < best_rnorm * (1.0 - 1e-12)) {
      best_rnorm = now;
      since_progress = 0;
    } else if (++since_progress > 25) {
      break;
    }
  }
  cert.iterations = it;

  for (std::size_t k = 0; k < atoms.size(); ++k)
    cert.blocks[atoms[k].p] += mu(k) * gnorm * atoms[k].z * atoms[k].z.transpose();
  Mat recon = Mat::Zero(n, n);
  for (std::size_t p = 0; p < Ps.size(); ++p) recon += Ps[p] * cert.blocks[p] * Ps[p].transpose();
  const Mat resid = 0.5 * ((g - recon) + (g - recon).transpose());
  cert.residual = resid.norm();
  cert.has_primal = true;
  const bool member_ok = cert.residual <= tol.certificate * (1.0 + gnorm);

  bool witness_ok = false;
  Mat G = -resid;
  const std::vector<PencilMax> vals = pencil_all(resid, Ps);
  double vmax = 0.0;
  for (const PencilMax& v : vals) vmax = std::max(vmax, v.value);
  G += vmax * Mat::Identity(n, n);
  const double gn = G.norm();
  if (gn > 0.0 && std::isfinite(gn)) {
    G /= gn;
    cert.witness = G;
    cert.has_witness = true;
    cert.witness_margin = (G * g).trace();
    double worst = std::numeric_limits<double>::infinity();
    for (const Mat& P : Ps) {
      Eigen::SelfAdjointEigenSolver<Mat> es(P.transpose() * G * P, Eigen::EigenvaluesOnly);
      cert.block_min_eigenvalues.push_back(es.eigenvalues()(0));
      worst = std::min(worst, es.eigenvalues()(0));
    }
    witness_ok = cert.witness_margin <= -tol.psd && worst >= -tol.psd;
  }

  cert.verdict = decide(member_ok, witness_ok, cert.note);
  return cert;
}

Verification verify_certificate(const ConicCertificate& cert, const CovMatrix& gamma, const GeneratorSet& gens) {
  const Mat g = gamma.dense();
  const double gnorm = g.norm();
  const Tolerances& tol = cert.tol;
  switch (cert.verdict) {
    case Verdict::Member: {
      if (cert.mu.size() != gens.size()) return {false, "coefficient count differs from generator count"};
      for (double m : cert.mu)
        if (!(m >= 0.0)) return {false, "negative coefficient"};
      const double r = (rank_one_sum(gens.directions(), cert.mu, gamma.n()) - g).norm();
      if (!(r <= tol.certificate * (1.0 + gnorm))) return {false, "residual"};
      return {};
    }
    case Verdict::NotMember: {
      const Mat& G = cert.witness;
      if (G.rows() != gamma.n() || G.cols() != gamma.n()) return {false, "witness shape"};
      if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12) return {false, "witness not symmetric"};
      if (std::abs(G.norm() - 1.0) > 1e-9) return {false, "witness not normalized"};
      if (!((G * g).trace() <= -tol.psd)) return {false, "witness margin: tr(G gamma) not negative"};
      if (!gens.empty() && !(min_generator_value(G, gens.directions()) >= -tol.psd))
        return {false, "witness negative on a generator"};
      return {};
    }
    case Verdict::Indeterminate: return {false, "indeterminate verdict carries no certificate"};
  }
  return {false, "unknown verdict"};
}

Verification verify_certificate(const SdpCertificate& cert, const CovMatrix& gamma,
                                const std::vector<CanonicalP>& pset) {
  const Mat g = gamma.dense();
  const double gnorm = g.norm();
  const Tolerances& tol = cert.tol;
  switch (cert.verdict) {
    case Verdict::Member: {
      if (cert.blocks.size() != pset.size()) return {false, "block count differs from P count"};
      Mat recon = Mat::Zero(gamma.n(), gamma.n());
      for (std::size_t p = 0; p < pset.size(); ++p) {
        const Mat& Z = cert.blocks[p];
        const Mat P = pset[p].as_double();
        if (Z.rows() != P.cols() || Z.cols() != P.cols()) return {false, "block shape"};
        if ((Z - Z.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Z.norm())) return {false, "block not symmetric"};
        Eigen::SelfAdjointEigenSolver<Mat> es(Z, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) < -tol.psd * (1.0 + Z.norm())) return {false, "block not PSD"};
        recon += P * Z * P.transpose();
      }
      if (!((recon - g).norm() <= tol.certificate * (1.0 + gnorm))) return {false, "residual"};
      return {};
    }
    case Verdict::NotMember: {
      const Mat& G = cert.witness;
      if (G.rows() != gamma.n() || G.cols() != gamma.n()) return {false, "witness shape"};
      if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12) return {false, "witness not symmetric"};
      if (std::abs(G.norm() - 1.0) > 1e-9) return {false, "witness not normalized"};
      if (!((G * g).trace() <= -tol.psd)) return {false, "witness margin: tr(G gamma) not negative"};
      for (const CanonicalP& cp : pset) {
        const Mat P = cp.as_double();
        Eigen::SelfAdjointEigenSolver<Mat> es(P.transpose() * G * P, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) < -tol.psd) return {false, "P^T G P not PSD"};
      }
      return {};
    }
    case Verdict::Indeterminate: return {false, "indeterminate verdict carries no certificate"};
  }
  return {false, "unknown verdict"};
}

}  // namespace mcov
