#pragma once

// Brute-force verifiers. Nothing here may depend on conic.hpp or the membership solvers.

#include "mcov/core.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace mcov {

using Seed = std::uint64_t;

std::uint64_t splitmix64(std::uint64_t x);
// Per-case seed: counter i mixed into the master seed.
Seed case_seed(Seed master, std::uint64_t i);

// Dirichlet(1) joint tables over the spectrum's cells, log-uniform weights in [0.1, 10].
// An empty spectrum means values 1..d on every site.
MicroModel sample_micromodel(int n, int d, const Spectrum& spectrum, int tuples, Seed seed, double nu = 1.0);

struct Atom {
  double weight = 0.0;
  std::vector<int> c;   // 1-based outcomes
  std::vector<int> cp;
};

// Symmetrized p x p split into two-point atoms; weights sum to 1.
std::vector<Atom> symmetrize_decompose(const std::vector<double>& joint, int n, int d);
// sum of weight * 2 * Gamma(c, c')
Mat reconstruct_naked(const std::vector<Atom>& atoms, int n, int d);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

enum class ExactVerdict { Member, NotMember };
const char* to_string(ExactVerdict v);

// gamma = {g11, g12, g22}; gens are directions w, each contributing w w^T.
// Exact basis enumeration over subsets of at most three generators.
ExactVerdict exact_2x2_membership(const std::array<Rational, 3>& gamma, const std::vector<std::array<Rational, 2>>& gens);

struct IntervalResult {
  std::vector<double> endpoints;  // a_0 = 0 < ... < a_dbar = 1
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// sum over intervals of 3 (a_{k+1} + a_k)^2 (a_{k+1} - a_k) / 4
double interval_objective(const std::vector<double>& endpoints);
IntervalResult interval_partition_opt(int d_bar, int iters = 10000);

}  // namespace mcov
