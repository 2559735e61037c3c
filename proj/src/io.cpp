#include "mcov/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mcov {

std::string format12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format12(x).c_str(), nullptr);
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path + ": malformed JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

namespace {

double number(const Json& j, const std::string& field) {
  if (!j.is_number()) throw ValidationError("field '" + field + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError("field '" + field + "' must be finite");
  return v;
}

long integer(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ValidationError("field '" + field + "' must be an integer");
  return j.get<long>();
}

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError("missing field '" + where + key + "'");
  return j.at(key);
}

std::vector<double> number_array(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError("field '" + field + "' must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Json r12(double x) { return std::isfinite(x) ? Json(round12(x)) : Json(nullptr); }

Json vec_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(r12(x));
  return a;
}

Json intvec_json(const std::vector<int>& v) { return Json(v); }

Json tol_json(const Tolerances& t) {
  return {{"residual", t.residual}, {"psd", t.psd}, {"certificate", t.certificate}};
}

}  // namespace

Mat matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ValidationError("field '" + field + "' must be a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw ValidationError("field '" + field + "[0]' must be an array");
  const std::size_t cols = j[0].size();
  Mat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rf = field + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) throw ValidationError("field '" + rf + "' has the wrong length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = number(j[r][c], rf + "[" + std::to_string(c) + "]");
  }
  return m;
}

CovMatrix covmatrix_from_json(const Json& j) {
  std::string field = "data";
  const Json* src = &j;
  if (j.is_object()) {
    bool found = false;
    for (const char* key : {"data", "gamma", "matrix"}) {
      if (j.contains(key)) {
        src = &j.at(key);
        field = key;
        found = true;
        break;
      }
    }
    if (!found) throw ValidationError("missing field 'data'");
  }
  const Mat m = matrix_from_json(*src, field);
  if (m.rows() != m.cols()) throw ValidationError("field '" + field + "' must be square");
  if (j.is_object() && j.contains("n") && integer(j.at("n"), "n") != m.rows())
    throw ValidationError("field 'n' does not match the matrix size");
  try {
    return CovMatrix::from_dense(m);
  } catch (const ValidationError& e) {
    throw ValidationError("field '" + field + "': " + e.what());
  }
}

Spectrum spectrum_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("field 'spectrum' must be an object");
  Spectrum s;
  if (j.contains("sites")) {
    const Json& sites = j.at("sites");
    if (!sites.is_array() || sites.empty()) throw ValidationError("field 'sites' must be a non-empty array");
    for (std::size_t i = 0; i < sites.size(); ++i) s.sites.push_back(number_array(sites[i], "sites[" + std::to_string(i) + "]"));
    if (j.contains("identical")) {
      if (!j.at("identical").is_boolean()) throw ValidationError("field 'identical' must be a boolean");
      s.identical = j.at("identical").get<bool>();
    }
  } else {
    const long n = integer(member(j, "n", ""), "n");
    if (n < 1) throw ValidationError("field 'n' must be positive");
    if (j.contains("values")) {
      s = Spectrum::uniform(static_cast<int>(n), number_array(j.at("values"), "values"));
    } else {
      if (!member(j, "family", "").is_string()) throw ValidationError("field 'family' must be a string");
      const std::string fam = j.at("family").get<std::string>();
      if (fam == "equally_spaced") {
        const long d = integer(member(j, "d", ""), "d");
        if (d < 1) throw ValidationError("field 'd' must be positive");
        s = Spectrum::equally_spaced(static_cast<int>(n), static_cast<int>(d));
      } else if (fam == "geometric") {
        const double mu = number(member(j, "mu", ""), "mu");
        const long lo = integer(member(j, "a_min", ""), "a_min");
        const long hi = integer(member(j, "a_max", ""), "a_max");
        if (hi < lo) throw ValidationError("field 'a_max' must be >= a_min");
        s = Spectrum::geometric(static_cast<int>(n), mu, lo, hi);
      } else {
        throw ValidationError("field 'family' must be equally_spaced or geometric");
      }
    }
  }
  try {
    s.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("field 'sites': ") + e.what());
  }
  return s;
}

MicroModel model_from_json(const Json& j) {
  const Json& tuples = member(j, "tuples", "");
  if (!tuples.is_array() || tuples.empty()) throw ValidationError("field 'tuples' must be a non-empty array");
  MicroModel m;
  for (std::size_t l = 0; l < tuples.size(); ++l) {
    const std::string where = "tuples[" + std::to_string(l) + "].";
    const Json& t = tuples[l];
    Tuple tup;
    if (t.contains("weight")) tup.weight = number(t.at("weight"), where + "weight");
    if (t.contains("nu")) tup.nu = number(t.at("nu"), where + "nu");
    try {
      tup.spectrum = spectrum_from_json(member(t, "spectrum", where));
    } catch (const ValidationError& e) {
      throw ValidationError(where + "spectrum: " + e.what());
    }
    tup.joint = number_array(member(t, "joint", where), where + "joint");
    m.tuples.push_back(std::move(tup));
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("field 'tuples': ") + e.what());
  }
  return m;
}

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(r12(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const Spectrum& s) {
  Json sites = Json::array();
  for (const auto& site : s.sites) sites.push_back(vec_json(site));
  Json j{{"sites", sites}, {"identical", s.identical}};
  if (s.truncation) {
    j["truncation"] = {{"family", s.truncation->family},
                       {"parameter", r12(s.truncation->parameter)},
                       {"first_index", s.truncation->first_index},
                       {"last_index", s.truncation->last_index}};
  }
  return j;
}

Json to_json(const MicroModel& m) {
  Json tuples = Json::array();
  for (const auto& t : m.tuples)
    tuples.push_back({{"weight", r12(t.weight)}, {"nu", r12(t.nu)}, {"spectrum", to_json(t.spectrum)}, {"joint", vec_json(t.joint)}});
  return {{"schema_version", kSchemaVersion}, {"tuples", tuples}};
}

Json to_json(const ConicCertificate& cert, const GeneratorSet& gens) {
  Json j{{"schema_version", kSchemaVersion},
         {"kind", "fixed"},
         {"verdict", to_string(cert.verdict)},
         {"tolerances", tol_json(cert.tol)},
         {"iterations", cert.iterations},
         {"generator_count", gens.size()},
         {"note", cert.note}};
  if (cert.has_primal && cert.verdict != Verdict::NotMember) {
    Json terms = Json::array();
    for (std::size_t k = 0; k < cert.mu.size() && k < gens.size(); ++k) {
      if (cert.mu[k] == 0.0) continue;
      std::vector<double> w(gens.directions()[k].data(), gens.directions()[k].data() + gens.directions()[k].size());
      Json term{{"mu", r12(cert.mu[k])}, {"direction", vec_json(w)}};
      const auto& tag = gens.tags()[k];
      term["kind"] = tag.kind == GeneratorTag::Kind::Difference ? "difference" : "value";
      term["c"] = intvec_json(tag.c);
      if (!tag.cp.empty()) term["cp"] = intvec_json(tag.cp);
      terms.push_back(term);
    }
    j["primal"] = {{"terms", terms}, {"residual", r12(cert.residual)}};
  }
  if (cert.has_witness && cert.verdict != Verdict::Member) {
    j["witness"] = {{"G", matrix_to_json(cert.witness)},
                    {"margin", r12(cert.witness_margin)},
                    {"min_generator_value", r12(cert.min_generator_value)}};
  }
  return j;
}

Json to_json(const SdpCertificate& cert, const std::vector<CanonicalP>& pset) {
  Json j{{"schema_version", kSchemaVersion},
         {"kind", "free"},
         {"verdict", to_string(cert.verdict)},
         {"tolerances", tol_json(cert.tol)},
         {"iterations", cert.iterations},
         {"pset_size", pset.size()},
         {"note", cert.note}};
  if (cert.has_primal && cert.verdict != Verdict::NotMember) {
    Json blocks = Json::array();
    for (std::size_t k = 0; k < cert.blocks.size() && k < pset.size(); ++k) {
      if (cert.blocks[k].norm() == 0.0) continue;
      blocks.push_back({{"p_index", k}, {"P", to_json(pset[k])}, {"Z", matrix_to_json(cert.blocks[k])}});
    }
    j["primal"] = {{"blocks", blocks}, {"residual", r12(cert.residual)}};
  }
  if (cert.has_witness && cert.verdict != Verdict::Member) {
    j["witness"] = {{"G", matrix_to_json(cert.witness)},
                    {"margin", r12(cert.witness_margin)},
                    {"block_min_eigenvalues", vec_json(cert.block_min_eigenvalues)}};
  }
  return j;
}

Json to_json(const Verification& v) { return {{"ok", v.ok}, {"violated", v.violated}}; }

Json to_json(const RegionPolygon& poly) {
  Json verts = Json::array();
  for (const auto& p : poly.vertices) verts.push_back({r12(p[0]), r12(p[1])});
  Json j{{"schema_version", kSchemaVersion},
         {"mode", poly.mode},
         {"exact", poly.exact},
         {"outer_approximation", !poly.exact},
         {"vertex_role", poly.exact ? "exact" : "inner_hull"},
         {"generator_count", poly.generator_count},
         {"directions", poly.support.size()},
         {"A1", matrix_to_json(poly.A1)},
         {"A2", matrix_to_json(poly.A2)},
         {"vertices", verts}};
  if (!poly.outer_vertices.empty()) {
    Json outer = Json::array();
    for (const auto& p : poly.outer_vertices) outer.push_back({r12(p[0]), r12(p[1])});
    j["outer_vertices"] = outer;
  }
  return j;
}

Json to_json(const ChainReport& r) {
  Json j{{"schema_version", kSchemaVersion},
         {"n", r.n},
         {"d", r.d},
         {"g_star", r12(r.g_star)},
         {"g_two", r12(r.g_two)},
         {"eigen_min", r12(r.solver_min)},
         {"quantum_value", r12(r.quantum_value)},
         {"gap", r12(r.gap)},
         {"star_equals_two", r.star_equals_two},
         {"circulant_max_error", r12(r.circulant_max_error)},
         {"impossibility",
          {{"hypothesis_ok", r.impossibility.hypothesis_ok}, {"distance_bound", r12(r.impossibility.distance_bound)}}}};
  if (r.has_brute) j["g_two_brute"] = {{"value", r12(r.g_two_brute)}, {"zeros", r.brute_zeros}};
  return j;
}

Json to_json(const CanonicalP& p) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < p.matrix.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < p.matrix.cols(); ++c) row.push_back(p.matrix(r, c));
    rows.push_back(row);
  }
  return {{"n", p.n}, {"d", p.d}, {"matrix", rows}, {"c", p.c}, {"cp", p.cp}};
}

Json to_json(const IntervalResult& r) {
  return {{"schema_version", kSchemaVersion},
          {"d_bar", static_cast<int>(r.endpoints.size()) - 1},
          {"endpoints", vec_json(r.endpoints)},
          {"value", r12(r.value)},
          {"converged", r.converged},
          {"iterations", r.iterations}};
}

Json to_json(const std::vector<Atom>& atoms) {
  Json a = Json::array();
  for (const auto& atom : atoms) a.push_back({{"weight", r12(atom.weight)}, {"c", atom.c}, {"cp", atom.cp}});
  return a;
}

std::string region_csv(const RegionPolygon& poly) {
  std::ostringstream os;
  os << "theta,vx,vy\n";
  for (const auto& s : poly.support) os << format12(s.theta) << ',' << format12(s.vx) << ',' << format12(s.vy) << '\n';
  // closing row repeats the first
  if (!poly.support.empty()) {
    const auto& s = poly.support.front();
    os << format12(s.theta) << ',' << format12(s.vx) << ',' << format12(s.vy) << '\n';
  }
  return os.str();
}

}  // namespace mcov
