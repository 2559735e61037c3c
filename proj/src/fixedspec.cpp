#include "mcov/fixedspec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcov {

const char* to_string(NuMode m) {
  switch (m) {
    case NuMode::Unit: return "one";
    case NuMode::Small: return "small";
    case NuMode::Free: return "free";
  }
  return "one";
}

NuMode parse_nu_mode(const std::string& s) {
  if (s == "one" || s == "unit" || s == "1") return NuMode::Unit;
  if (s == "small") return NuMode::Small;
  if (s == "free") return NuMode::Free;
  throw ValidationError("unknown nu mode '" + s + "' (expected one, small or free)");
}

namespace {

struct SiteChoice {
  double value;
  int c;
  int cp;  // 0 for value choices
};

std::vector<SiteChoice> site_differences(const std::vector<double>& lambda) {
  std::vector<SiteChoice> out;
  const int d = static_cast<int>(lambda.size());
  for (int a = 1; a <= d; ++a)
    for (int b = 1; b <= d; ++b) out.push_back({lambda[a - 1] - lambda[b - 1], a, b});
  std::stable_sort(out.begin(), out.end(), [](const SiteChoice& x, const SiteChoice& y) { return x.value < y.value; });
  out.erase(std::unique(out.begin(), out.end(), [](const SiteChoice& x, const SiteChoice& y) { return x.value == y.value; }),
            out.end());
  return out;
}

std::vector<SiteChoice> site_values(const std::vector<double>& lambda) {
  std::vector<SiteChoice> out;
  for (std::size_t a = 0; a < lambda.size(); ++a) out.push_back({lambda[a], static_cast<int>(a) + 1, 0});
  return out;
}

struct Product {
  std::vector<std::vector<SiteChoice>> choices;
  std::vector<int> dims;
  std::size_t total = 1;
};

Product make_product(std::vector<std::vector<SiteChoice>> choices) {
  Product p;
  p.choices = std::move(choices);
  for (const auto& c : p.choices) {
    p.dims.push_back(static_cast<int>(c.size()));
    p.total *= c.size();
  }
  return p;
}

// Fills row k of `flat` with the canonical direction of product element k, or NaN for zero.
void product_direction(const Product& prod, std::size_t k, double* out) {
  const int n = static_cast<int>(prod.dims.size());
  std::size_t rem = k;
  for (int i = n; i-- > 0;) {
    out[i] = prod.choices[i][rem % prod.dims[i]].value;
    rem /= prod.dims[i];
  }
  Eigen::Map<Vec> w(out, n);
  const Vec u = canonicalize_direction(w);
  if (u.size() == 0)
    w.setConstant(std::numeric_limits<double>::quiet_NaN());
  else
    w = u;
}

GeneratorTag product_tag(const Product& prod, std::size_t k, GeneratorTag::Kind kind) {
  const int n = static_cast<int>(prod.dims.size());
  GeneratorTag tag;
  tag.kind = kind;
  tag.c.resize(n);
  if (kind == GeneratorTag::Kind::Difference) tag.cp.resize(n);
  for (int i = n; i-- > 0;) {
    const SiteChoice& s = prod.choices[i][k % prod.dims[i]];
    k /= prod.dims[i];
    tag.c[i] = s.c;
    if (kind == GeneratorTag::Kind::Difference) tag.cp[i] = s.cp;
  }
  return tag;
}

void append(GeneratorSet& set, const Product& prod, GeneratorTag::Kind kind, bool parallel) {
  const int n = static_cast<int>(prod.dims.size());
  const long total = static_cast<long>(prod.total);
  std::vector<double> flat(static_cast<std::size_t>(total) * n);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < total; ++k) product_direction(prod, static_cast<std::size_t>(k), flat.data() + k * n);
  } else {
    for (long k = 0; k < total; ++k) product_direction(prod, static_cast<std::size_t>(k), flat.data() + k * n);
  }
  for (long k = 0; k < total; ++k) {
    const Eigen::Map<const Vec> u(flat.data() + k * n, n);
    if (std::isnan(u(0))) continue;
    set.add(u, product_tag(prod, static_cast<std::size_t>(k), kind));
  }
}

GeneratorSet build(const Spectrum& spectrum, NuMode mode, bool parallel) {
  spectrum.validate();
  GeneratorSet set(spectrum.n());
  if (mode == NuMode::Unit || mode == NuMode::Free) {
    std::vector<std::vector<SiteChoice>> ch;
    for (const auto& s : spectrum.sites) ch.push_back(site_differences(s));
    append(set, make_product(std::move(ch)), GeneratorTag::Kind::Difference, parallel);
  }
  if (mode == NuMode::Small || mode == NuMode::Free) {
    std::vector<std::vector<SiteChoice>> ch;
    for (const auto& s : spectrum.sites) ch.push_back(site_values(s));
    append(set, make_product(std::move(ch)), GeneratorTag::Kind::Value, parallel);
  }
  return set;
}

}  // namespace

GeneratorSet build_generators(const Spectrum& spectrum, NuMode mode) { return build(spectrum, mode, true); }
GeneratorSet build_generators_serial(const Spectrum& spectrum, NuMode mode) { return build(spectrum, mode, false); }

ConicCertificate membership_fixed(const CovMatrix& gamma, const Spectrum& spectrum, NuMode mode,
                                  const Tolerances& tol) {
  if (spectrum.n() != gamma.n()) throw StructuralError("spectrum site count differs from matrix dimension");
  return cone_membership_lp(gamma, build_generators(spectrum, mode), tol);
}

DichotomicResult dichotomic_check(const CovMatrix& gamma, double slack) {
  if (gamma.n() != 2) throw StructuralError("dichotomic_check needs a 2x2 matrix");
  DichotomicResult r;
  r.margin_xx = gamma(0, 0) - std::abs(gamma(0, 1));
  r.margin_yy = gamma(1, 1) - std::abs(gamma(0, 1));
  r.member = r.margin_xx >= -slack && r.margin_yy >= -slack;
  return r;
}

bool spin_check(const CovMatrix& gamma, int d, double slack) {
  if (d < 2) throw PreconditionError("spin_check needs d >= 2");
  if (gamma.n() != 2) throw StructuralError("spin_check needs a 2x2 matrix");
  return std::abs(gamma(0, 1)) <= (d - 1) * gamma(0, 0) + slack;
}

std::pair<double, double> spin_vertex(int d) {
  if (d < 2) throw PreconditionError("spin_vertex needs d >= 2");
  const double q = static_cast<double>(d - 1);
  return {1.0 / (1.0 + q * q), q / (1.0 + q * q)};
}

std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> pts) {
  std::sort(pts.begin(), pts.end());
  std::vector<std::array<double, 2>> uniq;
  for (const auto& p : pts)
    if (uniq.empty() || std::hypot(p[0] - uniq.back()[0], p[1] - uniq.back()[1]) > 1e-13) uniq.push_back(p);
  if (uniq.size() < 3) return uniq;
  auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::array<double, 2>> hull(2 * uniq.size());
  std::size_t k = 0;
  for (const auto& p : uniq) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = uniq.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], uniq[i]) <= 0.0) --k;
    hull[k++] = uniq[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool polygon_contains(const std::vector<std::array<double, 2>>& ccw, const std::array<double, 2>& p, double tol) {
  if (ccw.empty()) return false;
  if (ccw.size() == 1) return std::hypot(p[0] - ccw[0][0], p[1] - ccw[0][1]) <= tol;
  for (std::size_t i = 0; i < ccw.size(); ++i) {
    const auto& a = ccw[i];
    const auto& b = ccw[(i + 1) % ccw.size()];
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double len = std::hypot(ex, ey);
    if (len == 0.0) continue;
    // signed distance to the left of edge a->b
    if ((ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / len < -tol) return false;
  }
  return true;
}

namespace {

RegionPolygon region(const Spectrum& spectrum, NuMode mode, const Mat& A1, const Mat& A2, int n_dirs, bool parallel) {
  if (n_dirs < 8) throw PreconditionError("region_scan needs at least 8 directions");
  const int n = spectrum.n();
  if (A1.rows() != n || A1.cols() != n || A2.rows() != n || A2.cols() != n)
    throw StructuralError("projection matrices must be n x n");
  RegionPolygon poly;
  poly.A1 = A1;
  poly.A2 = A2;
  poly.mode = std::string("fixed:") + to_string(mode);
  const GeneratorSet gens = parallel ? build_generators(spectrum, mode) : build_generators_serial(spectrum, mode);
  poly.generator_count = gens.size();
  if (gens.empty()) {
    poly.vertices = {{0.0, 0.0}};
    for (int k = 0; k < n_dirs; ++k) poly.support.push_back({2.0 * M_PI * k / n_dirs, 0.0, 0.0, 0.0});
    return poly;
  }

  std::vector<std::array<double, 2>> pts;
  pts.reserve(gens.size());
  for (const Vec& w : gens.directions()) pts.push_back({w.dot(A1 * w), w.dot(A2 * w)});
  poly.vertices = convex_hull(pts);

  poly.support.resize(n_dirs);
  auto one = [&](int k) {
    const double th = 2.0 * M_PI * k / n_dirs;
    const Mat A = std::cos(th) * A1 + std::sin(th) * A2;
    const LinearOptResult r = cone_linear_opt_serial(A, gens);
    const auto& p = pts[r.index];
    poly.support[k] = {th, p[0], p[1], r.value};
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n_dirs; ++k) one(k);
  } else {
    for (int k = 0; k < n_dirs; ++k) one(k);
  }
  return poly;
}

}  // namespace

RegionPolygon region_scan(const Spectrum& spectrum, NuMode mode, const Mat& A1, const Mat& A2, int n_dirs) {
  return region(spectrum, mode, A1, A2, n_dirs, true);
}

RegionPolygon region_scan_serial(const Spectrum& spectrum, NuMode mode, const Mat& A1, const Mat& A2, int n_dirs) {
  return region(spectrum, mode, A1, A2, n_dirs, false);
}

std::pair<double, double> geometric_band(double mu) {
  if (std::isinf(mu) && mu > 0) return {0.0, 1.0};
  const double threshold = (3.0 + std::sqrt(2.0)) / 2.0;
  if (!(mu > threshold))
    throw PreconditionError("geometric_band requires mu > (3+sqrt(2))/2 ~ 2.2071, got " + std::to_string(mu));
  const double m1 = mu - 1.0;
  return {2.0 * m1 / (m1 * m1 + 1.0), 2.0 * mu * m1 / (m1 * m1 + mu * mu)};
}

bool brownian_check(const CovMatrix& gamma, double slack) {
  if (gamma.n() != 2) throw StructuralError("brownian_check needs a 2x2 matrix");
  const double det = gamma(0, 0) * gamma(1, 1) - gamma(0, 1) * gamma(0, 1);
  const double tr = gamma(0, 0) + gamma(1, 1);
  return det >= tr * tr / 8.0 - slack;
}

Mat brownian_w(int i, int j) {
  const double si = (i % 2 == 0) ? 1.0 : -1.0;
  const double sj = (j % 2 == 0) ? 1.0 : -1.0;
  Mat W(2, 2);
  W << 1.0 + sj, si, si, 1.0 - sj;
  return W;
}

double brownian_sweep_min(const CovMatrix& gamma, int n_angles) {
  if (gamma.n() != 2) throw StructuralError("brownian_sweep_min needs a 2x2 matrix");
  const Mat g = gamma.dense();
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_angles; ++k) {
    // rotations by phi and phi + pi act identically on gamma, so [0, pi) covers O(2) up to the i-sign
    const double phi = M_PI * k / n_angles;
    Mat O(2, 2);
    O << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    const Mat r = O * g * O.transpose();
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) worst = std::min(worst, (r * brownian_w(i, j)).trace());
  }
  return worst;
}

namespace {

Mat gram_factor(const CovMatrix& gamma) {
  const PsdStatus st = gamma.psd_status();
  if (!st.psd) throw PreconditionError("spacing_approximation needs a PSD matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(gamma.dense());
  const Vec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  // row k is the Gram vector w^k
  return es.eigenvectors() * ev.asDiagonal();
}

}  // namespace

SpacingApproximation spacing_approximation(const CovMatrix& gamma, int d, double L) {
  if (d < 1) throw PreconditionError("spacing_approximation needs d >= 1");
  const Mat W = gram_factor(gamma);
  const double wmax = W.cwiseAbs().maxCoeff();
  if (L <= 0.0) L = wmax > 0.0 ? wmax * (1.0 + 1e-12) + 1e-300 : 1.0;
  if (wmax > L) throw PreconditionError("spacing_approximation needs L >= max |w|");
  const double h = L / d;
  Mat U(W.rows(), W.cols());
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = 0; j < W.cols(); ++j) U(i, j) = h * std::floor(W(i, j) / h);
  SpacingApproximation out;
  const Mat approx = U * U.transpose();
  out.approx = CovMatrix::from_dense(0.5 * (approx + approx.transpose()), 0.0);
  out.error = (approx - gamma.dense()).norm();
  for (int a = 0; a <= 2 * d; ++a) out.outcomes.push_back(h * (a - d));
  out.scale = L;
  return out;
}

SpacingApproximation spacing_approximation(const CovMatrix& gamma, const std::vector<double>& outcomes) {
  if (outcomes.size() < 2) throw PreconditionError("spacing_approximation needs at least two outcomes");
  for (std::size_t a = 1; a < outcomes.size(); ++a)
    if (!(outcomes[a - 1] < outcomes[a])) throw PreconditionError("outcome sequence must be strictly increasing");
  std::vector<double> diffs;
  for (double x : outcomes)
    for (double y : outcomes) diffs.push_back(x - y);
  std::sort(diffs.begin(), diffs.end());
  diffs.erase(std::unique(diffs.begin(), diffs.end()), diffs.end());

  const Mat W = gram_factor(gamma);
  const double wmax = W.cwiseAbs().maxCoeff();
  const double span = outcomes.back() - outcomes.front();
  const double S = wmax > 0.0 ? span / wmax : 1.0;
  Mat U(W.rows(), W.cols());
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      const double x = S * W(i, j);
      auto it = std::upper_bound(diffs.begin(), diffs.end(), x);
      U(i, j) = it == diffs.begin() ? diffs.front() : *(it - 1);
    }
  SpacingApproximation out;
  const Mat approx = U * U.transpose() / (S * S);
  out.approx = CovMatrix::from_dense(0.5 * (approx + approx.transpose()), 0.0);
  out.error = (approx - gamma.dense()).norm();
  out.outcomes = outcomes;
  out.scale = S;
  return out;
}

AsymmetricBand asymmetric_band_check(int A_max, int B_max) {
  if (A_max < 1 || B_max < 1) throw PreconditionError("asymmetric_band_check needs positive ranges");
  AsymmetricBand best;
  best.value = 0.0;
  for (int a = 1; a <= A_max; ++a)
    for (int ap = 1; ap <= A_max; ++ap) {
      const double w1 = a - ap;
      if (w1 == 0.0) continue;
      for (int b = 1; b <= B_max; ++b)
        for (int bp = 1; bp <= B_max; ++bp) {
          const double w2 = 1.0 / b - 1.0 / bp;
          const double v = std::abs(w1 * w2) / (w1 * w1);
          if (v > best.value) best = {v, true, a, ap, b, bp};
        }
    }
  best.bounded = best.value <= 1.0;
  return best;
}

}  // namespace mcov
