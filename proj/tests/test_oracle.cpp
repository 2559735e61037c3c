#include "helpers.hpp"

#include "mcov/conic.hpp"
#include "mcov/fixedspec.hpp"
#include "mcov/oracle.hpp"

#include <doctest.h>

using namespace mcov;
using testing::max_abs;

namespace {

bool same_model(const MicroModel& a, const MicroModel& b) {
  if (a.tuples.size() != b.tuples.size()) return false;
  for (std::size_t l = 0; l < a.tuples.size(); ++l) {
    const Tuple &x = a.tuples[l], &y = b.tuples[l];
    if (x.weight != y.weight || x.nu != y.nu || x.joint != y.joint || x.spectrum.sites != y.spectrum.sites) return false;
  }
  return true;
}

// Cone spanned by every naked two-point generator of (n, d).
GeneratorSet naked_generators(int n, int d) {
  GeneratorSet gens(n * d);
  std::vector<int> dims(2 * n, d), idx;
  const std::size_t total = table_size(dims);
  for (std::size_t f = 0; f < total; ++f) {
    decode_index(f, dims, idx);
    Vec w = Vec::Zero(n * d);
    for (int i = 0; i < n; ++i) {
      w(i * d + idx[i]) += 1.0;
      w(i * d + idx[n + i]) -= 1.0;
    }
    if (w.norm() > 0.0) gens.add(w);
  }
  return gens;
}

}  // namespace

TEST_CASE("seeds") {
  CHECK(splitmix64(0) != splitmix64(1));
  CHECK(case_seed(7, 0) == case_seed(7, 0));
  CHECK(case_seed(7, 0) != case_seed(7, 1));
  CHECK(case_seed(7, 3) != case_seed(8, 3));
}

TEST_CASE("sample_micromodel") {
  const MicroModel a = sample_micromodel(2, 2, {}, 5, 42);
  const MicroModel b = sample_micromodel(2, 2, {}, 5, 42);
  CHECK(same_model(a, b));
  CHECK_FALSE(same_model(a, sample_micromodel(2, 2, {}, 5, 43)));
  REQUIRE(a.tuples.size() == 5);
  for (const Tuple& t : a.tuples) {
    CHECK(t.weight >= 0.1);
    CHECK(t.weight <= 10.0);
    double s = 0.0;
    for (double p : t.joint) {
      CHECK(p > 0.0);
      s += p;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(sample_micromodel(2, 2, {}, 0, 1), PreconditionError);
  CHECK_THROWS_AS(sample_micromodel(2, 2, {}, 1, 1, 0.0), PreconditionError);
  CHECK_THROWS_AS(sample_micromodel(3, 2, Spectrum::equally_spaced(2, 2), 1, 1), StructuralError);
}

TEST_CASE("sampled covariances are members") {
  const Spectrum s = Spectrum::equally_spaced(2, 2);
  const CovMatrix g = covariance_of_model(sample_micromodel(2, 2, s, 5, 42));
  CHECK(membership_fixed(g, s, NuMode::Unit).verdict == Verdict::Member);
  for (Seed seed = 0; seed < 50; ++seed) {
    const Spectrum s3 = Spectrum::uniform(3, {-1.0, 0.5, 2.0});
    const MicroModel half = sample_micromodel(3, 3, s3, 4, case_seed(11, seed), 0.5);
    CHECK(membership_fixed(covariance_of_model(half), s3, NuMode::Free).verdict == Verdict::Member);
    const MicroModel one = sample_micromodel(3, 3, s3, 4, case_seed(12, seed));
    CHECK(membership_fixed(covariance_of_model(one), s3, NuMode::Unit).verdict == Verdict::Member);
  }
}

TEST_CASE("symmetrize_decompose examples") {
  SUBCASE("point mass") {
    std::vector<double> joint(4, 0.0);
    joint[2] = 1.0;
    const auto atoms = symmetrize_decompose(joint, 2, 2);
    REQUIRE(atoms.size() == 1);
    CHECK(atoms[0].weight == 1.0);
    CHECK(atoms[0].c == atoms[0].cp);
    CHECK(atoms[0].c == std::vector<int>{2, 1});
    CHECK(max_abs(reconstruct_naked(atoms, 2, 2)) == 0.0);
  }
  SUBCASE("uniform single site") {
    const auto atoms = symmetrize_decompose({0.5, 0.5}, 1, 2);
    double w11 = 0, w22 = 0, w12 = 0;
    for (const Atom& a : atoms) {
      if (a.c[0] == 1 && a.cp[0] == 1) w11 += a.weight;
      else if (a.c[0] == 2 && a.cp[0] == 2) w22 += a.weight;
      else w12 += a.weight;
    }
    CHECK(w11 == doctest::Approx(0.25));
    CHECK(w22 == doctest::Approx(0.25));
    CHECK(w12 == doctest::Approx(0.5));
    Mat expect(2, 2);
    expect << 0.25, -0.25, -0.25, 0.25;
    CHECK(max_abs(reconstruct_naked(atoms, 1, 2) - expect) <= 1e-15);
  }
  CHECK_THROWS_AS(symmetrize_decompose({0.5, 0.5, 0.0}, 1, 2), StructuralError);
}

TEST_CASE("two independent proofs of membership for naked covariances") {
  std::mt19937_64 rng(100);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::vector<double> joint = testing::random_joint(rng, 9);
    const auto atoms = symmetrize_decompose(joint, 2, 3);
    double total = 0.0;
    for (const Atom& a : atoms) total += a.weight;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    worst = std::max(worst, max_abs(reconstruct_naked(atoms, 2, 3) - naked_covariance(joint, 2, 3).entries));
  }
  CHECK(worst < 1e-10);

  const GeneratorSet gens = naked_generators(2, 2);
  for (int t = 0; t < 30; ++t) {
    const std::vector<double> joint = testing::random_joint(rng, 4);
    const CovMatrix g = CovMatrix::from_dense(naked_covariance(joint, 2, 2).entries);
    const ConicCertificate c = cone_membership_lp(g, gens);
    CHECK(c.verdict == Verdict::Member);
    CHECK(verify_certificate(c, g, gens).ok);
    CHECK(max_abs(reconstruct_naked(symmetrize_decompose(joint, 2, 2), 2, 2) - g.dense()) < 1e-10);
  }
}

TEST_CASE("exact 2x2 membership") {
  using R = Rational;
  const std::vector<std::array<R, 2>> gens{{R{1, 1}, R{0, 1}}, {R{0, 1}, R{1, 1}}, {R{1, 1}, R{1, 1}}, {R{1, 1}, R{-1, 1}}};
  CHECK(exact_2x2_membership({R{1, 1}, R{1, 1}, R{1, 1}}, gens) == ExactVerdict::Member);
  CHECK(exact_2x2_membership({R{1, 1}, R{2, 1}, R{1, 1}}, gens) == ExactVerdict::NotMember);
  CHECK(exact_2x2_membership({R{0, 1}, R{0, 1}, R{0, 1}}, gens) == ExactVerdict::Member);
  CHECK(exact_2x2_membership({R{1, 2}, R{1, 1}, R{21, 10}}, gens) == ExactVerdict::NotMember);
  CHECK(std::string(to_string(ExactVerdict::Member)) == "MEMBER");

  // cross-validation against the floating LP on 10^4 rational instances
  const std::vector<double> values{0.0, 1.0, 3.0};
  std::vector<std::array<R, 2>> rgens;
  GeneratorSet fgens(2);
  for (double a : values)
    for (double b : values)
      for (double ap : values)
        for (double bp : values) {
          const Vec w = Vec::Map(std::array<double, 2>{a - ap, b - bp}.data(), 2);
          if (fgens.add(w)) rgens.push_back({R{std::int64_t(a - ap), 1}, R{std::int64_t(b - bp), 1}});
        }
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> diag(0, 20), off(-20, 20), den(1, 7);
  int decided = 0, disagree = 0;
  for (int t = 0; t < 10000; ++t) {
    const int q = den(rng);
    const std::array<R, 3> g{R{diag(rng), q}, R{off(rng), q}, R{diag(rng), q}};
    Mat m(2, 2);
    m << double(g[0].num) / q, double(g[1].num) / q, double(g[1].num) / q, double(g[2].num) / q;
    const Verdict v = cone_membership_lp(CovMatrix::from_dense(m), fgens).verdict;
    if (v == Verdict::Indeterminate) continue;
    ++decided;
    disagree += (exact_2x2_membership(g, rgens) == ExactVerdict::Member) != (v == Verdict::Member);
  }
  CHECK(disagree == 0);
  CHECK(decided > 8000);
}

TEST_CASE("interval partition optimization") {
  const IntervalResult r1 = interval_partition_opt(1);
  CHECK(r1.value == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(r1.endpoints == std::vector<double>{0.0, 1.0});
  for (int db = 1; db <= 5; ++db) {
    const IntervalResult r = interval_partition_opt(db);
    CHECK(r.converged);
    REQUIRE(r.endpoints.size() == std::size_t(db + 1));
    CHECK(std::abs(r.value - (1.0 - 1.0 / (4.0 * db * db))) <= 1e-6);
    for (int k = 0; k < db; ++k) CHECK(std::abs(r.endpoints[k + 1] - r.endpoints[k] - 1.0 / db) <= 1e-5);
  }
  CHECK(interval_partition_opt(2).value == doctest::Approx(15.0 / 16.0).epsilon(1e-9));
  CHECK(interval_partition_opt(5).value == doctest::Approx(0.99).epsilon(1e-9));
  CHECK(interval_objective({0.0, 0.5, 1.0}) == doctest::Approx(15.0 / 16.0).epsilon(1e-15));
  const IntervalResult capped = interval_partition_opt(4, 1);
  CHECK_FALSE(capped.converged);
  CHECK(capped.value <= 1.0 - 1.0 / 64.0 + 1e-12);
  CHECK_THROWS_AS(interval_partition_opt(0), PreconditionError);
}
