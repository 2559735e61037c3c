#include "mcov/freespec.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace mcov {

Pattern dependency_pattern(const std::vector<int>& c, const std::vector<int>& cp, int d) {
  const int n = static_cast<int>(c.size());
  if (static_cast<int>(cp.size()) != n) throw StructuralError("outcome lists differ in length");
  // spanning forest over outcome labels; tree edge k carries t_k = lambda_u - lambda_v
  struct Edge {
    int u, v;
  };
  std::vector<Edge> edges;
  std::vector<int> parent(d + 1);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };

  std::vector<std::vector<int>> rows(n);
  for (int i = 0; i < n; ++i) {
    const int a = c[i], b = cp[i];
    if (a < 1 || a > d || b < 1 || b > d) throw StructuralError("outcome index out of range");
    if (a == b) continue;
    if (find(a) != find(b)) {
      parent[find(a)] = find(b);
      rows[i].assign(edges.size() + 1, 0);
      rows[i][edges.size()] = 1;
      edges.push_back({a, b});
      continue;
    }
    // lambda_a - lambda_b as a signed sum along the tree path from b to a
    std::vector<int> via_edge(d + 1, -1), prev(d + 1, 0);
    std::vector<int> queue{b};
    std::vector<char> seen(d + 1, 0);
    seen[b] = 1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int x = queue[q];
      for (std::size_t k = 0; k < edges.size(); ++k) {
        int y = -1;
        if (edges[k].u == x) y = edges[k].v;
        if (edges[k].v == x) y = edges[k].u;
        if (y < 0 || seen[y]) continue;
        seen[y] = 1;
        via_edge[y] = static_cast<int>(k);
        prev[y] = x;
        queue.push_back(y);
      }
    }
    std::vector<int> coef(edges.size(), 0);
    for (int y = a; y != b; y = prev[y]) {
      const Edge& e = edges[via_edge[y]];
      // step prev[y] -> y adds lambda_y - lambda_prev
      coef[via_edge[y]] += (e.u == y) ? 1 : -1;
    }
    rows[i] = coef;
  }
  Pattern p;
  p.rank = static_cast<int>(edges.size());
  p.matrix = Eigen::MatrixXi::Zero(n, p.rank);
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) p.matrix(i, static_cast<int>(k)) = rows[i][k];
  return p;
}

namespace {

using Key = std::vector<int>;

Key key_of(const Eigen::MatrixXi& m) {
  Key k;
  k.reserve(m.size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) k.push_back(m(i, j));
  return k;
}

void candidates_rec(int n, int d, int row, int N, Eigen::MatrixXi& cur, std::vector<Eigen::MatrixXi>& out) {
  if (row == n) {
    if (N == d - 1) out.push_back(cur);
    return;
  }
  if (N + (n - row) < d - 1) return;
  // dependent or zero row over the first N columns
  long combos = 1;
  for (int k = 0; k < N; ++k) combos *= 3;
  for (long m = 0; m < combos; ++m) {
    long r = m;
    for (int k = 0; k < d - 1; ++k) cur(row, k) = 0;
    for (int k = 0; k < N; ++k) {
      cur(row, k) = static_cast<int>(r % 3) - 1;
      r /= 3;
    }
    candidates_rec(n, d, row + 1, N, cur, out);
  }
  if (N < d - 1) {
    for (int k = 0; k < d - 1; ++k) cur(row, k) = k == N ? 1 : 0;
    candidates_rec(n, d, row + 1, N + 1, cur, out);
  }
  for (int k = 0; k < d - 1; ++k) cur(row, k) = 0;
}

struct Realized {
  std::map<Key, std::size_t> first_pair;  // pattern -> smallest flat pair index
};

void scan_pairs(int n, int d, std::size_t lo, std::size_t hi, std::size_t per_side, Realized& out) {
  std::vector<int> c(n), cp(n);
  for (std::size_t idx = lo; idx < hi; ++idx) {
    std::size_t a = idx / per_side, b = idx % per_side;
    for (int i = n; i-- > 0;) {
      c[i] = static_cast<int>(a % d) + 1;
      cp[i] = static_cast<int>(b % d) + 1;
      a /= d;
      b /= d;
    }
    const Pattern p = dependency_pattern(c, cp, d);
    if (p.rank != d - 1) continue;
    out.first_pair.emplace(key_of(p.matrix), idx);  // keeps the first (smallest) index
  }
}

void decode_pair(std::size_t idx, int n, int d, std::size_t per_side, std::vector<int>& c, std::vector<int>& cp) {
  c.assign(n, 0);
  cp.assign(n, 0);
  std::size_t a = idx / per_side, b = idx % per_side;
  for (int i = n; i-- > 0;) {
    c[i] = static_cast<int>(a % d) + 1;
    cp[i] = static_cast<int>(b % d) + 1;
    a /= d;
    b /= d;
  }
}

std::vector<CanonicalP> enumerate(int n, int d, bool parallel) {
  if (n < 1) throw PreconditionError("enumerate_canonical_P needs n >= 1");
  if (d < 2) throw PreconditionError("enumerate_canonical_P needs d >= 2");
  if (d > n + 1) return {};

  std::size_t per_side = 1;
  for (int i = 0; i < n; ++i) per_side *= static_cast<std::size_t>(d);
  const std::size_t total = per_side * per_side;
  if (total > 4'000'000'000ULL) throw PreconditionError("realizability search exceeds desk scale");

  Realized realized;
  if (parallel) {
    const long chunks = 64;
    std::vector<Realized> parts(chunks);
#pragma omp parallel for schedule(dynamic)
    for (long ch = 0; ch < chunks; ++ch) {
      const std::size_t lo = total * ch / chunks, hi = total * (ch + 1) / chunks;
      scan_pairs(n, d, lo, hi, per_side, parts[ch]);
    }
    for (const Realized& part : parts)
      for (const auto& [k, idx] : part.first_pair) {
        auto [it, ins] = realized.first_pair.emplace(k, idx);
        if (!ins) it->second = std::min(it->second, idx);
      }
  } else {
    scan_pairs(n, d, 0, total, per_side, realized);
  }

  std::vector<Eigen::MatrixXi> cands = condition_candidates(n, d);
  std::vector<CanonicalP> out;
  std::size_t matched = 0;
  for (const Eigen::MatrixXi& m : cands) {
    auto it = realized.first_pair.find(key_of(m));
    if (it == realized.first_pair.end()) continue;
    ++matched;
    CanonicalP p;
    p.n = n;
    p.d = d;
    p.matrix = m;
    decode_pair(it->second, n, d, per_side, p.c, p.cp);
    out.push_back(std::move(p));
  }
  if (matched != realized.first_pair.size())
    throw std::logic_error("a realized dependency pattern violates the canonical conditions");
  return out;
}

}  // namespace

std::vector<Eigen::MatrixXi> condition_candidates(int n, int d) {
  std::vector<Eigen::MatrixXi> out;
  if (d < 2 || d > n + 1) return out;
  Eigen::MatrixXi cur = Eigen::MatrixXi::Zero(n, d - 1);
  candidates_rec(n, d, 0, 0, cur, out);
  std::sort(out.begin(), out.end(), [](const Eigen::MatrixXi& a, const Eigen::MatrixXi& b) { return key_of(a) < key_of(b); });
  return out;
}

std::vector<CanonicalP> enumerate_canonical_P(int n, int d) { return enumerate(n, d, true); }
std::vector<CanonicalP> enumerate_canonical_P_serial(int n, int d) { return enumerate(n, d, false); }

Eigen::VectorXi null_sign_vector(const CanonicalP& p) {
  const int n = static_cast<int>(p.matrix.rows());
  const int r = static_cast<int>(p.matrix.cols());
  Eigen::VectorXi s = Eigen::VectorXi::Zero(n);
  if (r >= n) return Eigen::VectorXi();
  // row index opening each column
  std::vector<int> opener(r, -1);
  int N = 0;
  for (int i = 0; i < n; ++i) {
    int last = 0;
    for (int k = 0; k < r; ++k)
      if (p.matrix(i, k) != 0) last = k + 1;
    if (last == N + 1) {
      opener[N] = i;
      N = last;
      continue;
    }
    // first dependent (or zero) row: s = e_i - sum_k P_ik e_{opener[k]}
    s(i) = 1;
    for (int k = 0; k < r; ++k)
      if (p.matrix(i, k) != 0) s(opener[k]) = -p.matrix(i, k);
    return s;
  }
  return Eigen::VectorXi();
}

SdpCertificate membership_free(const CovMatrix& gamma, int d, const Tolerances& tol) {
  if (d < 2) throw PreconditionError("membership_free needs d >= 2");
  const int n = gamma.n();
  return sdp_membership(gamma, enumerate_canonical_P(n, std::min(d, n + 1)), tol);
}

WitnessReport witness_valid(const Mat& G, int n, int d, bool want_example, const Tolerances& tol) {
  if (G.rows() != n || G.cols() != n) throw StructuralError("witness must be n x n");
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + G.norm()))
    throw ValidationError("witness is not symmetric");
  WitnessReport rep;
  rep.G = G;
  const double gn = G.norm();
  const Mat Gn = gn > 0.0 ? Mat(G / gn) : G;
  Eigen::SelfAdjointEigenSolver<Mat> es(Gn);
  rep.min_eigenvalue = es.eigenvalues()(0) * gn;
  bool blocks_ok = true;
  for (const CanonicalP& p : enumerate_canonical_P(n, std::min(d, n + 1))) {
    const Mat P = p.as_double();
    Eigen::SelfAdjointEigenSolver<Mat> bs(P.transpose() * Gn * P, Eigen::EigenvaluesOnly);
    rep.block_min_eigenvalues.push_back(bs.eigenvalues()(0));
    if (bs.eigenvalues()(0) < -tol.psd) blocks_ok = false;
  }
  const bool has_negative = es.eigenvalues()(0) < -tol.psd;
  rep.valid = has_negative && blocks_ok;
  if (want_example && has_negative) {
    const Vec v = es.eigenvectors().col(0);
    rep.violating_example = v * v.transpose();
    rep.violating_value = (G * (*rep.violating_example)).trace();
  }
  return rep;
}

WitnessB identity_witness_B(int n) {
  if (n < 2) throw PreconditionError("identity_witness_B needs n >= 2");
  const double q = std::pow(4.0, n) - 1.0;
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = std::pow(2.0, i);
  WitnessB w;
  w.B = (1.0 - 3.0 / (n * q)) * Mat::Identity(n, n) - (3.0 / q) * v * v.transpose();
  return w;
}

Mat k_ratio_matrix(int n) {
  if (n < 2) throw PreconditionError("k_ratio needs n >= 2");
  const double q = std::pow(4.0, n) - 1.0;
  Mat G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = std::pow(2.0, i + j) * 3.0 / q;
  return G;
}

KRatio k_ratio(int n) {
  KRatio r;
  r.closed_form = 1.0 - 3.0 / (n * (std::pow(4.0, n) - 1.0));
  r.solver = sdp_linear_opt(k_ratio_matrix(n), enumerate_canonical_P(n, n)).value;
  r.agree = std::abs(r.closed_form - r.solver) <= 1e-6;
  return r;
}

ContinuumBound continuum_step_bound(int d) {
  if (d < 1) throw PreconditionError("continuum_step_bound needs d >= 1");
  ContinuumBound b;
  b.d = d;
  b.d_bar = d * (d - 1) / 2 + 1;
  b.bound = 1.0 - 1.0 / (4.0 * b.d_bar * b.d_bar);
  return b;
}

RegionPolygon region_scan_free(int n, int d, const Mat& A1, const Mat& A2, int n_dirs) {
  if (n_dirs < 8) throw PreconditionError("region_scan needs at least 8 directions");
  if (A1.rows() != n || A1.cols() != n || A2.rows() != n || A2.cols() != n)
    throw StructuralError("projection matrices must be n x n");
  const std::vector<CanonicalP> pset = enumerate_canonical_P(n, std::min(d, n + 1));
  RegionPolygon poly;
  poly.A1 = A1;
  poly.A2 = A2;
  poly.mode = "free:d=" + std::to_string(d);
  poly.exact = false;
  poly.generator_count = pset.size();
  poly.support.resize(n_dirs);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n_dirs; ++k) {
    const double th = 2.0 * M_PI * k / n_dirs;
    const SdpOptResult r = sdp_linear_opt_serial(std::cos(th) * A1 + std::sin(th) * A2, pset);
    const Vec u = pset[r.index].as_double() * r.z;
    poly.support[k] = {th, u.dot(A1 * u), u.dot(A2 * u), r.value};
  }
  std::vector<std::array<double, 2>> pts;
  for (const SupportPoint& s : poly.support) pts.push_back({s.vx, s.vy});
  poly.vertices = convex_hull(pts);
  for (int k = 0; k < n_dirs; ++k) {
    const SupportPoint& a = poly.support[k];
    const SupportPoint& b = poly.support[(k + 1) % n_dirs];
    const double det = std::cos(a.theta) * std::sin(b.theta) - std::sin(a.theta) * std::cos(b.theta);
    if (std::abs(det) < 1e-15) continue;
    const double x = (a.support * std::sin(b.theta) - b.support * std::sin(a.theta)) / det;
    const double y = (std::cos(a.theta) * b.support - std::cos(b.theta) * a.support) / det;
    poly.outer_vertices.push_back({x, y});
  }
  return poly;
}

}  // namespace mcov
