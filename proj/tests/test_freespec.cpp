#include "helpers.hpp"

#include "mcov/freespec.hpp"
#include "mcov/oracle.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace mcov;
using testing::max_abs;

namespace {

Eigen::MatrixXi imat(int rows, int cols, std::initializer_list<int> v) {
  Eigen::MatrixXi m(rows, cols);
  auto it = v.begin();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = *it++;
  return m;
}

bool contains(const std::vector<CanonicalP>& ps, const Eigen::MatrixXi& m) {
  for (const auto& p : ps)
    if (p.matrix.rows() == m.rows() && p.matrix.cols() == m.cols() && p.matrix == m) return true;
  return false;
}

CovMatrix powers_of_two(int n) {
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = std::pow(2.0, i + j + 2);
  return CovMatrix::from_dense(g);
}

Mat projector(const Mat& P) {
  const Eigen::ColPivHouseholderQR<Mat> qr(P);
  const Mat Q = qr.householderQ() * Mat::Identity(P.rows(), qr.rank());
  return Q * Q.transpose();
}

}  // namespace

TEST_CASE("canonical P enumeration: n = d = 3") {
  const auto ps = enumerate_canonical_P(3, 3);
  REQUIRE(ps.size() == 13);
  CHECK(contains(ps, imat(3, 2, {0, 0, 1, 0, 0, 1})));
  for (int i : {-1, 0, 1}) {
    CHECK(contains(ps, imat(3, 2, {1, 0, i, 0, 0, 1})));
    for (int j : {-1, 0, 1}) CHECK(contains(ps, imat(3, 2, {1, 0, 0, 1, i, j})));
  }
  std::set<std::vector<int>> keys;
  for (const auto& p : ps) {
    CHECK(p.check_conditions().empty());
    const Pattern w = dependency_pattern(p.c, p.cp, 3);
    CHECK(w.matrix == p.matrix);
    keys.insert(std::vector<int>(p.matrix.data(), p.matrix.data() + p.matrix.size()));
  }
  CHECK(keys.size() == ps.size());
}

TEST_CASE("canonical P enumeration: edge cases") {
  const auto full = enumerate_canonical_P(2, 3);
  REQUIRE(full.size() == 1);
  CHECK(full[0].matrix == Eigen::MatrixXi::Identity(2, 2));
  for (int n = 1; n <= 4; ++n) {
    const auto p = enumerate_canonical_P(n, n + 1);
    REQUIRE(p.size() == 1);
    CHECK(p[0].matrix == Eigen::MatrixXi::Identity(n, n));
  }
  CHECK(enumerate_canonical_P(2, 4).empty());
  CHECK_THROWS_AS(enumerate_canonical_P(3, 1), PreconditionError);

  const auto cols = enumerate_canonical_P(3, 2);
  REQUIRE(cols.size() == 13);
  for (int i : {-1, 0, 1}) {
    CHECK(contains(cols, imat(3, 1, {0, 1, i})));
    for (int j : {-1, 0, 1}) CHECK(contains(cols, imat(3, 1, {1, i, j})));
  }
  CHECK(contains(cols, imat(3, 1, {0, 0, 1})));
}

TEST_CASE("canonical P enumeration is complete") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 1; n <= 4; ++n) {
    for (int d = 2; d <= n + 1; ++d) {
      std::vector<double> lambda(d);
      for (auto& x : lambda) x = u(rng);
      std::map<int, std::vector<CanonicalP>> by_rank;
      for (int r = 1; r <= std::min(d - 1, n); ++r) by_rank[r] = enumerate_canonical_P(n, r + 1);
      std::size_t per_side = 1;
      for (int i = 0; i < n; ++i) per_side *= d;
      std::vector<int> c(n), cp(n);
      bool all_ok = true;
      for (std::size_t idx = 0; idx < per_side * per_side; ++idx) {
        std::size_t a = idx / per_side, b = idx % per_side;
        for (int i = n; i-- > 0;) {
          c[i] = int(a % d) + 1;
          cp[i] = int(b % d) + 1;
          a /= d;
          b /= d;
        }
        Vec w(n);
        for (int i = 0; i < n; ++i) w(i) = lambda[c[i] - 1] - lambda[cp[i] - 1];
        const Pattern pat = dependency_pattern(c, cp, d);
        if (pat.rank == 0) {
          all_ok &= w.norm() == 0.0;
          continue;
        }
        int matches = 0;
        for (const auto& p : by_rank[pat.rank])
          if (p.matrix == pat.matrix) {
            ++matches;
            const Mat P = p.as_double();
            const Vec t = P.colPivHouseholderQr().solve(w);
            all_ok &= (P * t - w).norm() <= 1e-12;
          }
        all_ok &= matches == 1;
      }
      INFO("n=" << n << " d=" << d);
      CHECK(all_ok);
    }
  }
}

TEST_CASE("canonical P column spaces are pairwise distinct") {
  for (int n = 1; n <= 3; ++n)
    for (int d = 2; d <= n + 1; ++d) {
      const auto ps = enumerate_canonical_P(n, d);
      std::vector<Mat> proj;
      for (const auto& p : ps) proj.push_back(projector(p.as_double()));
      for (std::size_t a = 0; a < proj.size(); ++a)
        for (std::size_t b = a + 1; b < proj.size(); ++b) CHECK(max_abs(proj[a] - proj[b]) > 1e-6);
    }
}

TEST_CASE("null sign vector") {
  for (int n = 2; n <= 4; ++n)
    for (int d = 2; d <= n; ++d)
      for (const auto& p : enumerate_canonical_P(n, d)) {
        const Eigen::VectorXi s = null_sign_vector(p);
        REQUIRE(s.size() == n);
        CHECK(s.cwiseAbs().maxCoeff() == 1);
        CHECK((s.transpose() * p.matrix).cwiseAbs().maxCoeff() == 0);
      }
  CHECK(null_sign_vector(enumerate_canonical_P(3, 4)[0]).size() == 0);
}

TEST_CASE("membership_free worked examples") {
  std::mt19937_64 rng(3);
  for (int n = 2; n <= 4; ++n) {
    const CovMatrix g = CovMatrix::from_dense(testing::random_psd(rng, n));
    CHECK(membership_free(g, n + 1).verdict == Verdict::Member);
    for (int d = 2; d <= n + 1; ++d)
      CHECK(membership_free(CovMatrix::from_dense(Mat::Identity(n, n)), d).verdict == Verdict::Member);
  }
  const SdpCertificate out = membership_free(powers_of_two(3), 3);
  CHECK(out.verdict == Verdict::NotMember);
  REQUIRE(out.has_witness);
  CHECK(witness_valid(out.witness, 3, 3).valid);
  CHECK(membership_free(powers_of_two(3), 4).verdict == Verdict::Member);
}

TEST_CASE("membership_free nesting and duality") {
  std::mt19937_64 rng(19);
  int rejections = 0;
  for (int t = 0; t < 40; ++t) {
    const int n = 3;
    const CovMatrix g = CovMatrix::from_dense(testing::random_psd(rng, n));
    Verdict prev = Verdict::Indeterminate;
    for (int d = 2; d <= n + 1; ++d) {
      const SdpCertificate c = membership_free(g, d);
      if (prev == Verdict::Member) CHECK(c.verdict != Verdict::NotMember);
      if (c.verdict == Verdict::NotMember) {
        ++rejections;
        REQUIRE(c.has_witness);
        CHECK(witness_valid(c.witness, n, d).valid);
      }
      if (c.verdict != Verdict::Indeterminate) prev = c.verdict;
    }
  }
  CHECK(rejections > 0);
}

TEST_CASE("witness validity") {
  CHECK_FALSE(witness_valid(Mat::Identity(3, 3), 3, 3).valid);
  CHECK_FALSE(witness_valid(-Mat::Identity(3, 3), 3, 3).valid);
  const WitnessReport b = witness_valid(identity_witness_B(3).B, 3, 3, true);
  CHECK(b.valid);
  CHECK(b.min_eigenvalue < 0.0);
  CHECK(b.block_min_eigenvalues.size() == 13);
  REQUIRE(b.violating_example.has_value());
  CHECK(b.violating_value < 0.0);
  CHECK(b.violating_value == doctest::Approx(b.min_eigenvalue).epsilon(1e-12));
  // the example is a member one level up
  CHECK(membership_free(CovMatrix::from_dense(*b.violating_example), 4).verdict == Verdict::Member);
  Mat asym = Mat::Identity(3, 3);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(witness_valid(asym, 3, 3), ValidationError);
}

TEST_CASE("identity witness B") {
  const WitnessB b2 = identity_witness_B(2);
  CHECK(b2.evaluate(powers_of_two(2)) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(b2.evaluate(CovMatrix::from_dense(Mat::Identity(2, 2))) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK_THROWS_AS(identity_witness_B(1), PreconditionError);

  // nonnegative on identical-spectrum models with n values per site
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= 4; ++n) {
    const WitnessB b = identity_witness_B(n);
    for (int t = 0; t < 200; ++t) {
      std::vector<double> vals(n);
      for (auto& x : vals) x = u(rng);
      std::sort(vals.begin(), vals.end());
      const MicroModel m = sample_micromodel(n, n, Spectrum::uniform(n, vals), 3, case_seed(23, t));
      const CovMatrix g = covariance_of_model(m);
      worst = std::min(worst, b.evaluate(g) / (1.0 + g.trace()));
    }
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("k ratio") {
  const KRatio k2 = k_ratio(2);
  CHECK(k2.closed_form == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(k2.agree);
  const KRatio k3 = k_ratio(3);
  CHECK(k3.closed_form == doctest::Approx(1.0 - 1.0 / 63.0).epsilon(1e-15));
  CHECK(k3.agree);
  CHECK(std::abs(k3.solver - k3.closed_form) <= 1e-6);
  for (int n = 2; n <= 6; ++n) CHECK(1.0 - 3.0 / (n * (std::pow(4.0, n) - 1.0)) < 1.0);
  CHECK(k_ratio_matrix(2)(1, 1) == doctest::Approx(4.0 * 3.0 / 15.0));
}

TEST_CASE("continuum step bound") {
  const ContinuumBound b2 = continuum_step_bound(2);
  CHECK(b2.d_bar == 2);
  CHECK(b2.bound == doctest::Approx(0.9375).epsilon(1e-15));
  const ContinuumBound b1 = continuum_step_bound(1);
  CHECK(b1.d_bar == 1);
  CHECK(b1.bound == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(continuum_step_bound(4).d_bar == 7);
  CHECK_THROWS_AS(continuum_step_bound(0), PreconditionError);
  for (int d = 1; d <= 3; ++d) {
    const ContinuumBound b = continuum_step_bound(d);
    const IntervalResult r = interval_partition_opt(b.d_bar);
    CHECK(r.value == doctest::Approx(b.bound).epsilon(1e-6));
  }
}

TEST_CASE("free region contains every fixed identical-spectrum region") {
  Mat A1 = Mat::Zero(2, 2), A2 = Mat::Zero(2, 2);
  A1(0, 0) = 1.0;
  A2(0, 1) = A2(1, 0) = 0.5;
  const RegionPolygon f = region_scan_free(2, 2, A1, A2, 72);
  CHECK_FALSE(f.vertices.empty());
  const RegionPolygon u = region_scan(Spectrum::uniform(2, {0.0, 1.0}), NuMode::Unit, A1, A2, 72);
  for (const auto& v : u.vertices) CHECK(polygon_contains(f.vertices, v, 1e-9));
}

TEST_CASE("free region slices nest in d") {
  Mat A1(3, 3), A2(3, 3);
  const Vec v1 = (Vec(3) << 1, 2, 4).finished(), v2 = (Vec(3) << 4, 2, 1).finished();
  A1 = v1 * v1.transpose() / v1.squaredNorm();
  A2 = v2 * v2.transpose() / v2.squaredNorm();
  RegionPolygon prev;
  for (int d = 2; d <= 4; ++d) {
    const RegionPolygon p = region_scan_free(3, d, A1, A2, 72);
    CHECK_FALSE(p.exact);
    const auto outer = convex_hull(p.outer_vertices);
    for (const auto& v : p.vertices) CHECK(polygon_contains(outer, v, 1e-9));
    if (d > 2)
      for (const auto& v : prev.vertices) CHECK(polygon_contains(outer, v, 1e-9));
    prev = p;
  }
}
