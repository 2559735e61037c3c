#include "mcov/fuzz.hpp"

#include "mcov/freespec.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace mcov {

FuzzConfig fuzz_config_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("fuzz config must be a JSON object");
  FuzzConfig c;
  auto get_int = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer()) throw ValidationError(std::string("field '") + key + "' must be an integer");
    out = j.at(key).get<int>();
  };
  auto get_str = [&](const char* key, std::string& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
    out = j.at(key).get<std::string>();
  };
  get_str("kind", c.kind);
  get_int("cases", c.cases);
  get_int("n", c.n);
  get_int("d", c.d);
  get_int("tuples", c.tuples);
  get_str("solver", c.solver);
  if (j.contains("nu")) {
    if (!j.at("nu").is_number()) throw ValidationError("field 'nu' must be a number");
    c.nu = j.at("nu").get<double>();
  }
  if (j.contains("corners")) {
    if (!j.at("corners").is_boolean()) throw ValidationError("field 'corners' must be a boolean");
    c.corners = j.at("corners").get<bool>();
  }
  if (c.kind != "soundness" && c.kind != "exact2x2") throw ValidationError("field 'kind' must be soundness or exact2x2");
  if (c.solver != "fixed" && c.solver != "free") throw ValidationError("field 'solver' must be fixed or free");
  if (c.cases < 0) throw ValidationError("field 'cases' must be >= 0");
  if (c.n < 1 || c.d < 2) throw ValidationError("field 'n' must be >= 1 and 'd' >= 2");
  if (c.tuples < 1) throw ValidationError("field 'tuples' must be >= 1");
  if (!(c.nu > 0.0 && c.nu <= 1.0)) throw ValidationError("field 'nu' must lie in (0, 1]");
  return c;
}

std::string digest_of(const Mat& m) {
  std::uint64_t h = 1469598103934665603ULL;
  char buf[40];
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const int len = std::snprintf(buf, sizeof buf, "%.17g;", m.data()[i]);
    for (int k = 0; k < len; ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 1099511628211ULL;
    }
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

FuzzRecord soundness_case(const FuzzConfig& cfg, int index, Seed seed, int corner) {
  FuzzRecord rec;
  rec.index = index;
  rec.seed = seed;
  MicroModel model;
  if (corner >= 0) {
    rec.corner = true;
    model = sample_micromodel(cfg.n, cfg.d, Spectrum{}, 1, seed, cfg.nu);
    auto& joint = model.tuples[0].joint;
    std::fill(joint.begin(), joint.end(), 0.0);
    if (corner == 0) {
      joint.front() = 1.0;
    } else {
      joint.front() = 0.5;
      joint.back() = 0.5;
    }
  } else {
    model = sample_micromodel(cfg.n, cfg.d, Spectrum{}, cfg.tuples, seed, cfg.nu);
  }
  const CovMatrix gamma = covariance_of_model(model);
  rec.digest = digest_of(gamma.dense());

  for (const auto& t : model.tuples) {
    const auto atoms = symmetrize_decompose(t.joint, cfg.n, cfg.d);
    const Mat diff = reconstruct_naked(atoms, cfg.n, cfg.d) - naked_covariance(t.joint, cfg.n, cfg.d).entries;
    rec.decompose_residual = std::max(rec.decompose_residual, diff.cwiseAbs().maxCoeff());
  }
  rec.oracle_verdict = "MEMBER";

  Verdict v;
  if (cfg.solver == "free") {
    const SdpCertificate cert = membership_free(gamma, cfg.d);
    v = cert.verdict;
    rec.residual = cert.has_primal ? cert.residual : cert.witness_margin;
  } else {
    const NuMode mode = cfg.nu == 1.0 ? NuMode::Unit : NuMode::Free;
    const ConicCertificate cert = membership_fixed(gamma, model.tuples[0].spectrum, mode);
    v = cert.verdict;
    rec.residual = cert.has_primal ? cert.residual : cert.witness_margin;
  }
  rec.verdict = to_string(v);
  rec.agreement = v == Verdict::Member && rec.decompose_residual < 1e-10;
  return rec;
}

FuzzRecord exact_case(int index, Seed seed) {
  FuzzRecord rec;
  rec.index = index;
  rec.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> diag(0, 24), off(-24, 24), den(1, 12);
  const std::int64_t q = den(rng);
  const std::array<Rational, 3> g{Rational{diag(rng), q}, Rational{off(rng), q}, Rational{diag(rng), q}};

  // outcome values {0, 1, 3} on both sites
  const std::vector<double> values{0.0, 1.0, 3.0};
  std::vector<std::array<Rational, 2>> gens;
  for (double a : values)
    for (double ap : values)
      for (double b : values)
        for (double bp : values)
          gens.push_back({Rational{static_cast<std::int64_t>(a - ap), 1}, Rational{static_cast<std::int64_t>(b - bp), 1}});
  rec.oracle_verdict = to_string(exact_2x2_membership(g, gens));

  Mat m(2, 2);
  m << static_cast<double>(g[0].num) / q, static_cast<double>(g[1].num) / q, static_cast<double>(g[1].num) / q,
      static_cast<double>(g[2].num) / q;
  rec.digest = digest_of(m);
  const ConicCertificate cert = membership_fixed(CovMatrix::from_dense(m), Spectrum::uniform(2, values), NuMode::Unit);
  rec.verdict = to_string(cert.verdict);
  rec.residual = cert.has_primal ? cert.residual : cert.witness_margin;
  rec.skipped = cert.verdict == Verdict::Indeterminate;
  rec.agreement = rec.skipped || rec.verdict == rec.oracle_verdict;
  return rec;
}

}  // namespace

std::vector<FuzzRecord> run_fuzz(const FuzzConfig& cfg, Seed master) {
  const int corners = cfg.kind == "soundness" && cfg.corners ? 2 : 0;
  const int total = cfg.cases + corners;
  std::vector<FuzzRecord> out(total);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < total; ++i) {
    const Seed seed = case_seed(master, static_cast<std::uint64_t>(i));
    if (cfg.kind == "exact2x2")
      out[i] = exact_case(i, seed);
    else
      out[i] = soundness_case(cfg, i, seed, i < corners ? i : -1);
  }
  return out;
}

Json to_json(const FuzzRecord& r) {
  return {{"schema_version", kSchemaVersion},
          {"index", r.index},
          {"seed", r.seed},
          {"corner", r.corner},
          {"digest", r.digest},
          {"verdict", r.verdict},
          {"oracle_verdict", r.oracle_verdict},
          {"residual", round12(r.residual)},
          {"decompose_residual", round12(r.decompose_residual)},
          {"skipped", r.skipped},
          {"agreement", r.agreement}};
}

}  // namespace mcov
