#pragma once

// Cross-validation harness: drives the oracles and the solvers side by side.

#include "mcov/io.hpp"

#include <string>
#include <vector>

namespace mcov {

struct FuzzConfig {
  std::string kind = "soundness";  // "soundness" | "exact2x2"
  int cases = 200;
  int n = 2;
  int d = 2;
  int tuples = 5;
  double nu = 1.0;
  std::string solver = "fixed";  // "fixed" | "free"
  bool corners = true;           // prepend point-mass and two-point joints
};

FuzzConfig fuzz_config_from_json(const Json& j);

struct FuzzRecord {
  int index = 0;
  Seed seed = 0;
  bool corner = false;
  std::string digest;
  std::string verdict;
  std::string oracle_verdict;
  double residual = 0.0;            // solver residual (primal) or witness margin
  double decompose_residual = 0.0;  // max reconstruction error over tuples
  bool agreement = false;
  bool skipped = false;  // exact2x2 cases inside the boundary band
};

// Soundness: sampled models must be MEMBER and decompose exactly.
// exact2x2: rational 2x2 gamma against {0,1}^2 UNIT generators, LP vs exact enumeration.
std::vector<FuzzRecord> run_fuzz(const FuzzConfig& cfg, Seed master);

Json to_json(const FuzzRecord& r);
std::string digest_of(const Mat& m);

}  // namespace mcov
