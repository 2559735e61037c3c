#include "helpers.hpp"

#include "mcov/chain.hpp"
#include "mcov/freespec.hpp"
#include "mcov/fuzz.hpp"
#include "mcov/io.hpp"

#include <doctest.h>
#include <omp.h>

using namespace mcov;

// Parallel kernels must reproduce their serial references exactly, whatever the thread count.

namespace {

struct Threads {
  int saved = omp_get_max_threads();
  explicit Threads(int n) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("build_generators") {
  Threads t(4);
  for (NuMode mode : {NuMode::Unit, NuMode::Small, NuMode::Free}) {
    const Spectrum s = Spectrum::uniform(3, {0.0, 1.0, 2.5, 4.0});
    const GeneratorSet a = build_generators(s, mode), b = build_generators_serial(s, mode);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a.directions()[k] == b.directions()[k]);
      CHECK(a.tags()[k].c == b.tags()[k].c);
    }
  }
}

TEST_CASE("cone_linear_opt and sdp_linear_opt") {
  Threads t(4);
  std::mt19937_64 rng(1);
  const GeneratorSet gens = build_generators(Spectrum::equally_spaced(3, 4), NuMode::Unit);
  const auto pset = enumerate_canonical_P(4, 3);
  for (int k = 0; k < 20; ++k) {
    const Mat A = testing::random_symmetric(rng, 3);
    const LinearOptResult a = cone_linear_opt(A, gens), b = cone_linear_opt_serial(A, gens);
    CHECK(a.value == b.value);
    CHECK(a.index == b.index);
    const Mat B = testing::random_symmetric(rng, 4);
    const SdpOptResult c = sdp_linear_opt(B, pset), d = sdp_linear_opt_serial(B, pset);
    CHECK(c.value == d.value);
    CHECK(c.index == d.index);
  }
}

TEST_CASE("g_two brute force") {
  Threads t(4);
  for (int n = 2; n <= 10; ++n) {
    const GTwoBrute a = g_two_brute(n), b = g_two_brute_serial(n);
    CHECK(a.value == b.value);
    CHECK(a.pattern == b.pattern);
    CHECK(a.zeros == b.zeros);
  }
}

TEST_CASE("canonical P enumeration") {
  Threads t(4);
  for (int n = 1; n <= 4; ++n)
    for (int d = 2; d <= n + 1; ++d) {
      const auto a = enumerate_canonical_P(n, d), b = enumerate_canonical_P_serial(n, d);
      REQUIRE(a.size() == b.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].matrix == b[k].matrix);
        CHECK(a[k].c == b[k].c);
        CHECK(a[k].cp == b[k].cp);
      }
    }
}

TEST_CASE("region scan") {
  Threads t(4);
  Mat A1 = Mat::Zero(2, 2), A2 = Mat::Zero(2, 2);
  A1(0, 0) = 1.0;
  A2(0, 1) = A2(1, 0) = 0.5;
  const Spectrum s = Spectrum::geometric(2, 5.0, -4, 4);
  const RegionPolygon a = region_scan(s, NuMode::Unit, A1, A2, 360), b = region_scan_serial(s, NuMode::Unit, A1, A2, 360);
  CHECK(a.vertices == b.vertices);
  REQUIRE(a.support.size() == b.support.size());
  for (std::size_t k = 0; k < a.support.size(); ++k) CHECK(a.support[k].support == b.support[k].support);
}

TEST_CASE("fuzz corpus is independent of the thread count") {
  FuzzConfig cfg;
  cfg.cases = 40;
  std::string one, four;
  {
    Threads t(1);
    for (const auto& r : run_fuzz(cfg, 7)) one += to_json(r).dump() + "\n";
  }
  {
    Threads t(4);
    for (const auto& r : run_fuzz(cfg, 7)) four += to_json(r).dump() + "\n";
  }
  CHECK(one == four);
}
