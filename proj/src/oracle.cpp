#include "mcov/oracle.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace mcov {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Seed case_seed(Seed master, std::uint64_t i) { return splitmix64(splitmix64(master) ^ splitmix64(i + 1)); }

MicroModel sample_micromodel(int n, int d, const Spectrum& spectrum, int tuples, Seed seed, double nu) {
  if (tuples < 1) throw PreconditionError("sample_micromodel needs at least one tuple");
  if (n < 1 || d < 1) throw PreconditionError("sample_micromodel needs n >= 1 and d >= 1");
  if (!(nu > 0.0 && nu <= 1.0)) throw PreconditionError("nu must lie in (0, 1]");
  const Spectrum spec = spectrum.n() == 0 ? Spectrum::equally_spaced(n, d) : spectrum;
  if (spec.n() != n) throw StructuralError("spectrum has the wrong number of sites");
  std::vector<int> dims(n);
  for (int i = 0; i < n; ++i) dims[i] = spec.size(i);
  const std::size_t cells = table_size(dims);

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(std::log(0.1), std::log(10.0));
  MicroModel model;
  for (int l = 0; l < tuples; ++l) {
    Tuple t;
    t.weight = std::exp(unif(rng));
    t.nu = nu;
    t.spectrum = spec;
    t.joint.resize(cells);
    double total = 0.0;
    for (auto& p : t.joint) total += (p = expo(rng));
    for (auto& p : t.joint) p /= total;
    model.tuples.push_back(std::move(t));
  }
  return model;
}

std::vector<Atom> symmetrize_decompose(const std::vector<double>& joint, int n, int d) {
  const std::size_t cells = table_size(std::vector<int>(n, d));
  if (joint.size() != cells) throw StructuralError("joint table size mismatch");
  double total = 0.0;
  for (double p : joint) {
    if (p < 0.0) throw ValidationError("joint table has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("joint table must sum to 1");

  std::vector<std::size_t> support;
  for (std::size_t k = 0; k < cells; ++k)
    if (joint[k] > 0.0) support.push_back(k);

  const std::vector<int> dims(n, d);
  std::vector<Atom> atoms;
  std::vector<int> a, b;
  for (std::size_t i = 0; i < support.size(); ++i) {
    decode_index(support[i], dims, a);
    for (std::size_t j = i; j < support.size(); ++j) {
      decode_index(support[j], dims, b);
      const double pi = joint[support[i]], pj = joint[support[j]];
      Atom atom;
      atom.weight = i == j ? pi * pi : 2.0 * pi * pj;
      atom.c.resize(n);
      atom.cp.resize(n);
      for (int s = 0; s < n; ++s) {
        atom.c[s] = a[s] + 1;
        atom.cp[s] = b[s] + 1;
      }
      atoms.push_back(std::move(atom));
    }
  }
  return atoms;
}

Mat reconstruct_naked(const std::vector<Atom>& atoms, int n, int d) {
  Mat out = Mat::Zero(n * d, n * d);
  for (const auto& atom : atoms) out += 2.0 * atom.weight * naked_generator(atom.c, atom.cp, n, d).entries;
  return out;
}

const char* to_string(ExactVerdict v) { return v == ExactVerdict::Member ? "MEMBER" : "NOT_MEMBER"; }

namespace {

mpq_class to_mpq(const Rational& r) {
  if (r.den == 0) throw ValidationError("rational with zero denominator");
  mpq_class q(mpz_class(static_cast<long>(r.num)), mpz_class(static_cast<long>(r.den)));
  q.canonicalize();
  return q;
}

// Solves cols * x = rhs exactly for linearly independent columns; false when inconsistent or dependent.
bool exact_solve(std::vector<std::array<mpq_class, 3>> cols, std::array<mpq_class, 3> rhs, std::vector<mpq_class>& x) {
  const int k = static_cast<int>(cols.size());
  // augmented 3 x (k+1), row-major
  std::vector<std::vector<mpq_class>> m(3, std::vector<mpq_class>(k + 1));
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < k; ++c) m[r][c] = cols[c][r];
    m[r][k] = rhs[r];
  }
  int row = 0;
  std::vector<int> pivot_row(k, -1);
  for (int c = 0; c < k; ++c) {
    int p = -1;
    for (int r = row; r < 3; ++r)
      if (m[r][c] != 0) {
        p = r;
        break;
      }
    if (p < 0) return false;  // dependent columns
    std::swap(m[p], m[row]);
    for (int r = 0; r < 3; ++r) {
      if (r == row || m[r][c] == 0) continue;
      const mpq_class f = m[r][c] / m[row][c];
      for (int cc = c; cc <= k; ++cc) m[r][cc] -= f * m[row][cc];
    }
    pivot_row[c] = row++;
  }
  for (int r = row; r < 3; ++r)
    if (m[r][k] != 0) return false;
  x.assign(k, 0);
  for (int c = 0; c < k; ++c) x[c] = m[pivot_row[c]][k] / m[pivot_row[c]][c];
  return true;
}

}  // namespace

ExactVerdict exact_2x2_membership(const std::array<Rational, 3>& gamma, const std::vector<std::array<Rational, 2>>& gens) {
  const std::array<mpq_class, 3> g{to_mpq(gamma[0]), to_mpq(gamma[1]), to_mpq(gamma[2])};
  if (g[0] == 0 && g[1] == 0 && g[2] == 0) return ExactVerdict::Member;
  // every generator is PSD, so the cone is too
  if (g[0] < 0 || g[2] < 0 || g[0] * g[2] < g[1] * g[1]) return ExactVerdict::NotMember;

  std::vector<std::array<mpq_class, 3>> cols;
  for (const auto& w : gens) {
    const mpq_class a = to_mpq(w[0]), b = to_mpq(w[1]);
    if (a == 0 && b == 0) continue;
    cols.push_back({a * a, a * b, b * b});
  }
  const int m = static_cast<int>(cols.size());
  std::vector<mpq_class> x;
  auto feasible = [&](std::vector<std::array<mpq_class, 3>> sub) {
    if (!exact_solve(std::move(sub), g, x)) return false;
    return std::all_of(x.begin(), x.end(), [](const mpq_class& v) { return v >= 0; });
  };
  // every feasible point of a pointed cone program has a basic feasible solution
  for (int i = 0; i < m; ++i) {
    if (feasible({cols[i]})) return ExactVerdict::Member;
    for (int j = i + 1; j < m; ++j) {
      if (feasible({cols[i], cols[j]})) return ExactVerdict::Member;
      for (int k = j + 1; k < m; ++k)
        if (feasible({cols[i], cols[j], cols[k]})) return ExactVerdict::Member;
    }
  }
  return ExactVerdict::NotMember;
}

double interval_objective(const std::vector<double>& a) {
  double v = 0.0;
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    const double s = a[k + 1] + a[k];
    v += 0.75 * s * s * (a[k + 1] - a[k]);
  }
  return v;
}

IntervalResult interval_partition_opt(int d_bar, int iters) {
  if (d_bar < 1) throw PreconditionError("interval_partition_opt needs d_bar >= 1");
  IntervalResult r;
  r.endpoints.resize(d_bar + 1);
  for (int k = 0; k <= d_bar; ++k) r.endpoints[k] = static_cast<double>(k * k) / (static_cast<double>(d_bar) * d_bar);

  auto local = [](double lo, double x, double hi) {
    const double s1 = x + lo, s2 = hi + x;
    return s1 * s1 * (x - lo) + s2 * s2 * (hi - x);
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto& a = r.endpoints;
  double value = interval_objective(a);
  for (r.iterations = 0; r.iterations < iters; ++r.iterations) {
    for (int k = 1; k < d_bar; ++k) {
      double lo = a[k - 1], hi = a[k + 1];
      double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
      double f1 = local(a[k - 1], x1, a[k + 1]), f2 = local(a[k - 1], x2, a[k + 1]);
      while (hi - lo > 1e-14) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + inv_phi * (hi - lo);
          f2 = local(a[k - 1], x2, a[k + 1]);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - inv_phi * (hi - lo);
          f1 = local(a[k - 1], x1, a[k + 1]);
        }
      }
      a[k] = 0.5 * (lo + hi);
    }
    // positions are only resolved to ~sqrt(eps) by golden section, so stop on the objective
    const double next = interval_objective(a);
    const double gain = next - value;
    value = next;
    if (gain <= 1e-15) {
      r.converged = true;
      ++r.iterations;
      break;
    }
  }
  r.value = interval_objective(a);
  return r;
}

}  // namespace mcov
