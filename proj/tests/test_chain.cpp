#include "helpers.hpp"

#include "mcov/chain.hpp"
#include "mcov/oracle.hpp"

#include <doctest.h>

using namespace mcov;
using testing::max_abs;

namespace {

const double kPi = std::acos(-1.0);

// Alice holds one two-valued site, the n Bob sites share an n-valued spectrum.
Spectrum hope_spectrum(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Spectrum s;
  std::vector<double> a{u(rng), u(rng)};
  std::sort(a.begin(), a.end());
  s.sites.push_back(a);
  std::vector<double> b(n);
  for (auto& x : b) x = u(rng);
  std::sort(b.begin(), b.end());
  for (int k = 0; k < n; ++k) s.sites.push_back(b);
  return s;
}

HopeResult hope_of(const Mat& g) {
  const int n = static_cast<int>(g.rows()) - 1;
  return hope_check(g(0, 0), g.bottomRightCorner(n, n), g.row(0).tail(n).transpose());
}

}  // namespace

TEST_CASE("chain matrix") {
  Mat m2(2, 2);
  m2 << 1, -1, 1, 1;
  CHECK(max_abs(chain_coupling(2) - m2) == 0.0);
  for (int n = 2; n <= 12; ++n) {
    const Mat g = chain_matrix(n);
    CHECK(g.rows() == 2 * n);
    CHECK(g.trace() == 0.0);
    CHECK(max_abs(g - g.transpose()) == 0.0);
    CHECK(max_abs(g.topLeftCorner(n, n)) == 0.0);
    CHECK(max_abs(g.topRightCorner(n, n) - 0.5 * chain_coupling(n)) == 0.0);
  }
  CHECK_THROWS_AS(chain_matrix(1), PreconditionError);
}

TEST_CASE("g_star closed form and eigenvalue certificate") {
  CHECK(g_star(2).closed_form == doctest::Approx(-std::sqrt(2.0) / 2.0).epsilon(1e-15));
  CHECK(g_star(3).closed_form == doctest::Approx(-std::sqrt(3.0) / 2.0).epsilon(1e-15));
  for (int n = 2; n <= 12; ++n) {
    const GStar g = g_star(n);
    CHECK(g.certified);
    CHECK(std::abs(g.eigen_min - g.closed_form) <= 1e-9);
    Eigen::SelfAdjointEigenSolver<Mat> es(chain_matrix(n), Eigen::EigenvaluesOnly);
    CHECK(std::abs(es.eigenvalues()(0) + std::cos(kPi / (2 * n))) <= 1e-9);
  }
}

TEST_CASE("circulant spectrum") {
  const CirculantSpectrum c2 = circulant_eigs(2);
  REQUIRE(c2.eigenvalues.size() == 2);
  CHECK(c2.eigenvalues[0] == doctest::Approx(2.0));
  CHECK(c2.eigenvalues[1] == doctest::Approx(2.0));
  CHECK(circulant_eigs(4).top_eigenvalue == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));
  for (int n = 2; n <= 12; ++n) {
    const Mat G = circulant_matrix(n);
    CHECK(max_abs(G - chain_coupling(n).transpose() * chain_coupling(n)) <= 1e-14);
    Eigen::SelfAdjointEigenSolver<Mat> es(G);
    std::vector<double> analytic = circulant_eigs(n).eigenvalues;
    std::sort(analytic.begin(), analytic.end());
    for (int k = 0; k < n; ++k) CHECK(std::abs(analytic[k] - es.eigenvalues()(k)) <= 1e-10);

    const CirculantSpectrum cs = circulant_eigs(n);
    const Mat Q = cs.top_space;
    CHECK(max_abs(Q.transpose() * Q - Mat::Identity(Q.cols(), Q.cols())) <= 1e-12);
    CHECK(max_abs(G * Q - cs.top_eigenvalue * Q) <= 1e-10);
    if (n > 2) {
      // each basis vector fits sqrt(2/n) sin(k pi/n + delta): a sin + b cos with a^2 + b^2 = 2/n
      for (int col = 0; col < 2; ++col) {
        Mat basis(n, 2);
        for (int k = 0; k < n; ++k) {
          basis(k, 0) = std::sin((k + 1) * kPi / n);
          basis(k, 1) = std::cos((k + 1) * kPi / n);
        }
        const Vec coef = basis.colPivHouseholderQr().solve(Q.col(col));
        CHECK((basis * coef - Q.col(col)).norm() < 1e-9);
        CHECK(coef.squaredNorm() == doctest::Approx(2.0 / n).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("g_two closed form and brute force") {
  CHECK(g_two(2) == doctest::Approx(g_star(2).closed_form).epsilon(1e-15));
  CHECK(g_two(3) == doctest::Approx(-std::sqrt(3.0) / 2.0).epsilon(1e-15));
  CHECK(g_two(5) == doctest::Approx(-std::sqrt(7.0 / 8.0)).epsilon(1e-15));
  for (int n = 2; n <= 10; ++n) {
    const GTwoBrute b = g_two_brute(n);
    CHECK(std::abs(b.value - g_two(n)) <= 1e-9);
    if (n >= 3) CHECK(b.zeros == 1);
    CHECK(g_two(n) >= g_star(n).closed_form - 1e-12);
    if (n >= 4) CHECK(g_two(n) - g_star(n).closed_form >= 1e-3);
  }
  CHECK_THROWS_AS(g_two(1), PreconditionError);
}

TEST_CASE("quantum chain model saturates g_star") {
  for (int n = 2; n <= 12; ++n) {
    const QuantumChainModel q = quantum_chain_model(n);
    CHECK(q.covariance.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(q.value - g_star(n).closed_form) <= 1e-9);
    for (int k = 0; k < n; ++k) {
      CHECK(q.psi[k] == doctest::Approx(k * kPi / n));
      CHECK(q.phi[k] == doctest::Approx((2 * k + 1) * kPi / (2 * n)));
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(q.covariance, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= -1e-12);
  }
  CHECK(quantum_chain_value(6) == doctest::Approx(-std::cos(kPi / 12.0)).epsilon(1e-12));
}

TEST_CASE("impossibility bound") {
  const ImpossibilityBound b = impossibility_bound(10, 2);
  CHECK(b.hypothesis_ok);
  CHECK(b.distance_bound == doctest::Approx(0.4 * std::pow(std::sin(kPi / 20), 2) * std::pow(std::sin(kPi / 10), 2)));
  CHECK(b.distance_bound == doctest::Approx(9.35e-4).epsilon(1e-3));
  CHECK_FALSE(impossibility_bound(10, 3).hypothesis_ok);

  // vectors with at most ceil(n/2) - 2 distinct magnitudes stay away from W
  const int n = 12;
  const double bound = impossibility_bound(n, 2).distance_bound;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  std::uniform_int_distribution<int> sign(-1, 1);
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 20000; ++t) {
    const int m = 1 + t % 4;
    std::vector<double> mags(m);
    for (auto& x : mags) x = u(rng);
    std::uniform_int_distribution<int> pick(0, m - 1);
    Vec w(n);
    for (int k = 0; k < n; ++k) w(k) = sign(rng) * mags[pick(rng)];
    if (w.norm() == 0.0) continue;
    worst = std::min(worst, distance_to_top_space(w));
  }
  CHECK(worst >= bound);
  // the top space itself sits at distance zero
  CHECK(distance_to_top_space(circulant_eigs(n).top_space.col(0)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("one-interaction inequality") {
  const HopeResult zero = hope_check(0.7, 0.3 * Mat::Identity(3, 3), Vec::Zero(3));
  CHECK(zero.satisfied);
  CHECK(zero.margin == doctest::Approx(0.5 * std::sqrt(63.0 / 3.0 - 1.0 / 3.0) * 1.6));

  const Mat v = hope_violating_matrix(2);
  CHECK(v(0, 1) == doctest::Approx(std::sqrt(0.2)));
  CHECK(v(0, 2) == doctest::Approx(2.0 * std::sqrt(0.2)));
  CHECK_FALSE(hope_of(v).satisfied);
  for (int n = 2; n <= 5; ++n) CHECK_FALSE(hope_of(hope_violating_matrix(n)).satisfied);

  std::mt19937_64 rng(5);
  double worst = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= 4; ++n)
    for (int t = 0; t < 150; ++t) {
      const Spectrum s = hope_spectrum(n, rng);
      const MicroModel m = sample_micromodel(n + 1, n, s, 1 + t % 3, case_seed(5, 1000 * n + t));
      const Mat g = covariance_of_model(m).dense();
      worst = std::min(worst, hope_of(g).margin / (1.0 + g.trace()));
    }
  CHECK(worst >= -1e-9);
  CHECK_THROWS_AS(hope_check(1.0, Mat::Identity(2, 2), Vec::Zero(3)), StructuralError);
}

TEST_CASE("chain report") {
  const ChainReport r = chain_report(8);
  CHECK(r.n == 8);
  CHECK(r.has_brute);
  CHECK(std::abs(r.solver_min - r.g_star) <= 1e-9);
  CHECK(std::abs(r.quantum_value - r.g_star) <= 1e-9);
  CHECK(r.gap == doctest::Approx(r.g_two - r.g_star));
  CHECK(r.circulant_max_error <= 1e-10);
  CHECK_FALSE(r.star_equals_two);
  CHECK(chain_report(3).star_equals_two);
  CHECK_FALSE(chain_report(14).has_brute);
}
