#pragma once

#include "mcov/chain.hpp"
#include "mcov/conic.hpp"
#include "mcov/fixedspec.hpp"
#include "mcov/oracle.hpp"

#include <json.hpp>

#include <string>

namespace mcov {

using Json = nlohmann::json;

constexpr int kSchemaVersion = 1;

// Rounds to 12 significant digits.
double round12(double x);
std::string format12(double x);

Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Parsers throw ValidationError naming the offending field.
Mat matrix_from_json(const Json& j, const std::string& field);
// Bare array of rows, or {"n": N, "data": [[...]]} ("gamma" and "matrix" are accepted aliases).
CovMatrix covmatrix_from_json(const Json& j);
// {"sites": [[...], ...]}, {"n": N, "values": [...]},
// {"n": N, "family": "equally_spaced", "d": D} or {"n": N, "family": "geometric", "mu": M, "a_min": A, "a_max": B}
Spectrum spectrum_from_json(const Json& j);
// {"tuples": [{"weight", "nu", "spectrum", "joint"}, ...]}
MicroModel model_from_json(const Json& j);

Json matrix_to_json(const Mat& m);
Json to_json(const Spectrum& s);
Json to_json(const MicroModel& m);
Json to_json(const ConicCertificate& cert, const GeneratorSet& gens);
Json to_json(const SdpCertificate& cert, const std::vector<CanonicalP>& pset);
Json to_json(const Verification& v);
Json to_json(const RegionPolygon& poly);
Json to_json(const ChainReport& r);
Json to_json(const CanonicalP& p);
Json to_json(const IntervalResult& r);
Json to_json(const std::vector<Atom>& atoms);

// theta,vx,vy rows plus a closing copy of the first row; 12 significant digits
std::string region_csv(const RegionPolygon& poly);

}  // namespace mcov
