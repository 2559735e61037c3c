// mcov: command-line front end.
// Exit codes: 0 MEMBER, 1 NOT_MEMBER, 2 INDETERMINATE, 64 invalid input, 65 precondition, 66 I/O.

#include "mcov/chain.hpp"
#include "mcov/fixedspec.hpp"
#include "mcov/freespec.hpp"
#include "mcov/fuzz.hpp"
#include "mcov/io.hpp"
#include "mcov/oracle.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mcov;

namespace {

constexpr int kExitInvalid = 64;
constexpr int kExitPrecondition = 65;
constexpr int kExitIo = 66;

struct Common {
  double tol_residual = Tolerances{}.residual;
  double tol_psd = Tolerances{}.psd;
  double tol_cert = Tolerances{}.certificate;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  std::string format;

  Tolerances tolerances() const {
    if (!(tol_residual > 0 && tol_psd > 0 && tol_cert > 0)) throw ValidationError("tolerances must be positive");
    return Tolerances{tol_residual, tol_psd, tol_cert};
  }
};

// Writes to <out>/<name> when --out is set, otherwise to stdout.
void emit(const Common& c, const std::string& name, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw std::runtime_error("cannot create " + c.out + ": " + ec.message());
  write_text_file((fs::path(c.out) / name).string(), text);
}

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::Member: return 0;
    case Verdict::NotMember: return 1;
    default: return 2;
  }
}

Vec parse_vector(const std::string& s, const std::string& flag) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("field '" + flag + "' must be a comma-separated list of numbers");
    }
  }
  if (vals.empty()) throw ValidationError("field '" + flag + "' is empty");
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Mat rank_one(const Vec& v) {
  const double nn = v.squaredNorm();
  if (nn == 0.0) throw ValidationError("projection vector must be nonzero");
  return v * v.transpose() / nn;
}

struct RegionArgs {
  std::string mode = "fixed";
  std::string spectrum_file;
  int spaced = 0;
  double geometric = 0.0;
  long amin = -6;
  long amax = 6;
  int n = 2;
  int d = 2;
  std::string nu = "one";
  std::string v1, v2;
  std::string proj_file;
  int dirs = 360;
};

int run_region(const Common& c, const RegionArgs& a) {
  if (a.dirs < 8) throw PreconditionError("--dirs must be at least 8");
  Mat A1, A2;
  int n = a.n;
  if (!a.proj_file.empty()) {
    const Json j = load_json_file(a.proj_file);
    if (!j.is_object() || !j.contains("A1") || !j.contains("A2")) throw ValidationError("missing field 'A1' or 'A2'");
    A1 = matrix_from_json(j.at("A1"), "A1");
    A2 = matrix_from_json(j.at("A2"), "A2");
    n = static_cast<int>(A1.rows());
  } else if (!a.v1.empty() || !a.v2.empty()) {
    if (a.v1.empty() || a.v2.empty()) throw ValidationError("field 'v1' and 'v2' must be given together");
    A1 = rank_one(parse_vector(a.v1, "v1"));
    A2 = rank_one(parse_vector(a.v2, "v2"));
    n = static_cast<int>(A1.rows());
  } else {
    if (n != 2) throw ValidationError("default projections need n = 2; pass --v1/--v2 or --proj");
    A1 = Mat::Zero(2, 2);
    A2 = Mat::Zero(2, 2);
    A1(0, 0) = 1.0;
    A2(0, 1) = A2(1, 0) = 0.5;
  }
  if (A1.rows() != A1.cols() || A2.rows() != n || A2.cols() != n || A1.rows() != n)
    throw ValidationError("field 'A1'/'A2' must be square matrices of equal size");

  RegionPolygon poly;
  if (a.mode == "free") {
    poly = region_scan_free(n, a.d, A1, A2, a.dirs);
  } else if (a.mode == "fixed") {
    Spectrum s;
    if (!a.spectrum_file.empty()) {
      s = spectrum_from_json(load_json_file(a.spectrum_file));
    } else if (a.spaced > 0) {
      s = Spectrum::equally_spaced(n, a.spaced);
    } else if (a.geometric > 0.0) {
      s = Spectrum::geometric(n, a.geometric, a.amin, a.amax);
    } else {
      throw ValidationError("fixed mode needs --spectrum, --spaced or --geometric");
    }
    if (s.n() != n) throw ValidationError("field 'sites' must match the projection size");
    poly = region_scan(s, parse_nu_mode(a.nu), A1, A2, a.dirs);
  } else {
    throw ValidationError("field 'mode' must be fixed or free");
  }

  const std::string csv = region_csv(poly);
  const std::string json = to_json(poly).dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << (c.format == "json" ? json : csv);
  } else {
    emit(c, "region.csv", csv);
    emit(c, "region.json", json);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariance cone membership, region scans and chain reports"};
  app.fallthrough();
  app.require_subcommand(1);
  Common common;
  app.add_option("--tol-residual", common.tol_residual, "Absolute slack and boundary band");
  app.add_option("--tol-psd", common.tol_psd, "PSD and witness-margin tolerance");
  app.add_option("--tol-cert", common.tol_cert, "Relative reconstruction tolerance");
  app.add_option("--seed", common.seed, "Master seed");
  app.add_option("--threads", common.threads, "OpenMP threads (1 = bit-identical CI output)");
  app.add_option("--out", common.out, "Output directory");
  app.add_option("--format", common.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string gamma_file, spectrum_file, nu = "one";
  auto* fixed = app.add_subcommand("membership-fixed", "Fixed-spectrum cone membership (LP)");
  fixed->add_option("gamma", gamma_file, "Covariance JSON")->required();
  fixed->add_option("spectrum", spectrum_file, "Spectrum JSON")->required();
  fixed->add_option("--nu", nu, "one | small | free");

  int free_d = 2;
  auto* free = app.add_subcommand("membership-free", "Free-spectrum cone membership (block SDP)");
  free->add_option("gamma", gamma_file, "Covariance JSON")->required();
  free->add_option("--d", free_d, "Outcomes per site")->required();

  RegionArgs ra;
  auto* region = app.add_subcommand("region", "Two-dimensional slice of the accessible region");
  region->add_option("--mode", ra.mode, "fixed | free");
  region->add_option("--spectrum", ra.spectrum_file, "Spectrum JSON");
  region->add_option("--spaced", ra.spaced, "Equally spaced spectrum with D values");
  region->add_option("--geometric", ra.geometric, "Geometric spectrum ratio");
  region->add_option("--amin", ra.amin, "Geometric truncation lower exponent");
  region->add_option("--amax", ra.amax, "Geometric truncation upper exponent");
  region->add_option("--n", ra.n, "Number of sites for built-in spectra");
  region->add_option("--d", ra.d, "Outcomes per site (free mode)");
  region->add_option("--nu", ra.nu, "one | small | free");
  region->add_option("--v1", ra.v1, "First rank-one projection, comma-separated");
  region->add_option("--v2", ra.v2, "Second rank-one projection, comma-separated");
  region->add_option("--proj", ra.proj_file, "JSON with matrices A1, A2");
  region->add_option("--dirs", ra.dirs, "Support directions");

  int chain_n = 2, chain_d = 2;
  auto* chain = app.add_subcommand("chain", "Chain functional report");
  chain->add_option("--n", chain_n, "Settings per party")->required();
  chain->add_option("--d", chain_d, "Outcomes per site");

  int pn = 3, pd = 3;
  auto* enump = app.add_subcommand("enumerate-p", "List canonical P matrices as JSONL");
  enump->add_option("--n", pn)->required();
  enump->add_option("--d", pd)->required();

  auto* oracle = app.add_subcommand("oracle", "Brute-force oracles");
  oracle->require_subcommand(1);
  std::string fuzz_config;
  int fuzz_cases = -1;
  auto* fuzz = oracle->add_subcommand("fuzz", "Seeded cross-validation corpus (JSONL)");
  fuzz->add_option("--config", fuzz_config, "Fuzz config JSON");
  fuzz->add_option("--cases", fuzz_cases, "Override the case count");
  std::string joint_file;
  auto* decompose = oracle->add_subcommand("decompose", "Two-point atom decomposition of a joint table");
  decompose->add_option("joint", joint_file, "JSON with n, d, joint")->required();
  int d_bar = 1;
  auto* intervals = oracle->add_subcommand("intervals", "Interval-partition optimization");
  intervals->add_option("--dbar", d_bar)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (common.threads > 0) omp_set_num_threads(common.threads);
    const Tolerances tol = common.tolerances();

    if (*fixed) {
      const CovMatrix gamma = covmatrix_from_json(load_json_file(gamma_file));
      const Spectrum spec = spectrum_from_json(load_json_file(spectrum_file));
      if (spec.n() != gamma.n()) throw ValidationError("field 'sites' must have one entry per matrix row");
      const NuMode mode = parse_nu_mode(nu);
      const GeneratorSet gens = build_generators(spec, mode);
      const ConicCertificate cert = membership_fixed(gamma, spec, mode, tol);
      Json j = to_json(cert, gens);
      j["verification"] = to_json(verify_certificate(cert, gamma, gens));
      emit(common, "certificate.json", j.dump(2) + "\n");
      return verdict_code(cert.verdict);
    }
    if (*free) {
      const CovMatrix gamma = covmatrix_from_json(load_json_file(gamma_file));
      if (free_d < 2) throw PreconditionError("--d must be at least 2");
      const SdpCertificate cert = membership_free(gamma, free_d, tol);
      const auto pset = enumerate_canonical_P(gamma.n(), std::min(free_d, gamma.n() + 1));
      Json j = to_json(cert, pset);
      j["d"] = free_d;
      j["verification"] = to_json(verify_certificate(cert, gamma, pset));
      if (cert.has_witness) j["witness"]["valid"] = witness_valid(cert.witness, gamma.n(), free_d, false, tol).valid;
      emit(common, "certificate.json", j.dump(2) + "\n");
      return verdict_code(cert.verdict);
    }
    if (*region) return run_region(common, ra);
    if (*chain) {
      if (chain_n < 2) throw PreconditionError("--n must be at least 2");
      emit(common, "chain.json", to_json(chain_report(chain_n, chain_d)).dump(2) + "\n");
      return 0;
    }
    if (*enump) {
      std::string lines;
      for (const auto& p : enumerate_canonical_P(pn, pd)) lines += to_json(p).dump() + "\n";
      emit(common, "pset.jsonl", lines);
      return 0;
    }
    if (*fuzz) {
      FuzzConfig cfg = fuzz_config_from_json(fuzz_config.empty() ? Json::object() : load_json_file(fuzz_config));
      if (fuzz_cases >= 0) cfg.cases = fuzz_cases;
      std::string lines;
      for (const auto& r : run_fuzz(cfg, common.seed)) lines += to_json(r).dump() + "\n";
      emit(common, "fuzz.jsonl", lines);
      return 0;
    }
    if (*decompose) {
      const Json j = load_json_file(joint_file);
      if (!j.is_object()) throw ValidationError("joint file must be a JSON object");
      for (const char* key : {"n", "d", "joint"})
        if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
      if (!j.at("n").is_number_integer() || !j.at("d").is_number_integer())
        throw ValidationError("field 'n' and 'd' must be integers");
      const int n = j.at("n").get<int>(), d = j.at("d").get<int>();
      if (n < 1 || d < 1) throw ValidationError("field 'n' and 'd' must be positive");
      if (!j.at("joint").is_array()) throw ValidationError("field 'joint' must be an array");
      std::vector<double> joint;
      for (const auto& v : j.at("joint")) {
        if (!v.is_number()) throw ValidationError("field 'joint' must hold numbers");
        joint.push_back(v.get<double>());
      }
      const auto atoms = symmetrize_decompose(joint, n, d);
      const Mat diff = reconstruct_naked(atoms, n, d) - naked_covariance(joint, n, d).entries;
      const Json out{{"schema_version", kSchemaVersion},
                     {"atoms", to_json(atoms)},
                     {"reconstruction_residual", round12(diff.cwiseAbs().maxCoeff())}};
      emit(common, "decompose.jsonl", out.dump() + "\n");
      return 0;
    }
    if (*intervals) {
      if (d_bar < 1) throw PreconditionError("--dbar must be at least 1");
      emit(common, "intervals.jsonl", to_json(interval_partition_opt(d_bar)).dump() + "\n");
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const StructuralError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitPrecondition;
}
