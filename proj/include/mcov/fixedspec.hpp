#pragma once

#include "mcov/conic.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace mcov {

enum class NuMode { Unit, Small, Free };

const char* to_string(NuMode m);
NuMode parse_nu_mode(const std::string& s);  // "one" | "unit" | "small" | "free"

// UNIT: differences w(c,c'); SMALL: value vectors v(c); FREE: both.
GeneratorSet build_generators(const Spectrum& spectrum, NuMode mode);
GeneratorSet build_generators_serial(const Spectrum& spectrum, NuMode mode);

ConicCertificate membership_fixed(const CovMatrix& gamma, const Spectrum& spectrum, NuMode mode,
                                  const Tolerances& tol = {});

struct DichotomicResult {
  bool member = false;
  double margin_xx = 0.0;  // gamma_XX - |gamma_XY|
  double margin_yy = 0.0;  // gamma_YY - |gamma_XY|
};
DichotomicResult dichotomic_check(const CovMatrix& gamma, double slack = 0.0);

// |gamma_12| <= (d-1) gamma_11
bool spin_check(const CovMatrix& gamma, int d, double slack = 0.0);
std::pair<double, double> spin_vertex(int d);

struct SupportPoint {
  double theta = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double support = 0.0;  // h(theta) = cos(theta) vx + sin(theta) vy
};

struct RegionPolygon {
  Mat A1;
  Mat A2;
  std::vector<SupportPoint> support;                 // one per direction, ordered by angle
  std::vector<std::array<double, 2>> vertices;       // convex hull, counterclockwise
  std::vector<std::array<double, 2>> outer_vertices;  // free mode only: support-line polygon
  std::string mode;                                  // "fixed:unit", "free:d=3", ...
  bool exact = true;                                 // false for free-mode support approximations
  std::size_t generator_count = 0;
};

RegionPolygon region_scan(const Spectrum& spectrum, NuMode mode, const Mat& A1, const Mat& A2, int n_dirs);
RegionPolygon region_scan_serial(const Spectrum& spectrum, NuMode mode, const Mat& A1, const Mat& A2, int n_dirs);

// Andrew monotone chain; drops collinear points. Returns counterclockwise vertices.
std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> pts);
bool polygon_contains(const std::vector<std::array<double, 2>>& ccw, const std::array<double, 2>& p,
                      double tol = 1e-12);

// Open interval of forbidden sin(theta) for geometric spectra; requires mu > (3+sqrt2)/2.
std::pair<double, double> geometric_band(double mu);

bool brownian_check(const CovMatrix& gamma, double slack = 0.0);
// min over the rotation sweep and i,j in {1,2} of tr(O gamma O^T W_ij)
double brownian_sweep_min(const CovMatrix& gamma, int n_angles = 720);
Mat brownian_w(int i, int j);

struct SpacingApproximation {
  CovMatrix approx;
  double error = 0.0;           // ||approx - gamma||_F
  std::vector<double> outcomes;  // the grid the approximation is representable on
  double scale = 1.0;
};

// Equally spaced construction: u = (L/d) floor((d/L) w), outcomes (L/d)(a-d), a = 0..2d.
// L <= 0 picks L slightly above the largest Gram entry.
SpacingApproximation spacing_approximation(const CovMatrix& gamma, int d, double L = 0.0);
// Arbitrary increasing outcome sequence: Gram entries are scaled to the outcome range and
// rounded down to the nearest representable difference.
SpacingApproximation spacing_approximation(const CovMatrix& gamma, const std::vector<double>& outcomes);

struct AsymmetricBand {
  double value = 0.0;  // max |w1 w2| / w1^2 over w1 != 0
  bool bounded = true;  // value <= 1
  int a = 0, ap = 0, b = 0, bp = 0;
};
AsymmetricBand asymmetric_band_check(int A_max, int B_max);

}  // namespace mcov
