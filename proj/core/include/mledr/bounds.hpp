#pragma once

// Closed-form bounds on Q_n: Rosenthal/Tchebychev, the Grand-Lebesgue
// subexponential bound and the martingale tail-transform bounds.

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "mledr/distributions.hpp"
#include "mledr/divergences.hpp"
#include "mledr/interpolation.hpp"

namespace mledr {

inline constexpr double kRosenthalConstant = 1.773682;

/// C_R^p m^p p^p / (n^(p/2) d^p (ln p)^p), clamped to 1.
BoundValue rosenthal_bound(double p, double momentNorm, double d, long n);

enum class PsiProvenance { Analytic, NaturalFromMoments };

struct PsiFunction {
  double a = 2.0;
  double b = std::numeric_limits<double>::infinity();
  std::function<double(double)> psi;
  PsiProvenance provenance = PsiProvenance::Analytic;
  /// ||xi|| in G(psi); 1 for the natural psi.
  double norm = 1.0;
  /// Points of the Legendre grid (within (a, b)).
  std::vector<double> grid;

  static PsiFunction analytic(std::function<double(double)> psi, double a, double b, double norm = 1.0);
  /// p ln psi(p) convex on the grid (discrete second differences >= -slack).
  bool log_convex(double slack = 1e-8) const;
};

/// psi(p) = (E |xi|^p)^(1/p) tabulated on pGrid; b is moved down to the first
/// p where the moment diverges.
PsiFunction gl_natural_psi(const DensityModel& model, const std::vector<double>& pGrid);

/// ln E|xi - center|^p, +inf when the moment diverges.
double log_abs_moment(const DensityModel& model, double p, double center = 0.0);

/// exp(-psi3(ln(sqrt(n) / norm))) with psi1 = C_R psi(p) p / (d ln p),
/// psi2 = p ln psi1 and psi3 the Legendre transform of psi2.
BoundValue gl_bound(const PsiFunction& psi, double d, long n);

/// d^-p (p - 1)^p n^(-p/2) (n^-1 sum |eta_i|_p^2)^(p/2), clamped to 1.
BoundValue martingale_moment_bound(double p, const std::vector<double>& momentNorms, double d, long n);

struct TailFunction {
  /// ln T(x) for x > 0; T nonincreasing with T(0+) <= 1.
  std::function<double(double)> logT;

  /// T(x) = exp(-(x / K)^q).
  static TailFunction weibull(double q, double K);
  double operator()(double x) const;
};

/// min(1, inf over v of [exp(-x^2 / (8 v^2)) + int_v^inf t^2 |dT(t)|]) on a
/// 400-point logarithmic v-grid over [1e-3, 1e3].
BoundValue tail_transform_W(const TailFunction& T, double x);

/// n^-(p-2), the shape of the Baum-Katz bound (its constant is unknown).
double baum_katz_shape(double p, long n);

/// Constants of the tilted pair built on a symmetric base f0:
/// Q_n = P(mean |xi| < ln C) under f0.
struct TiltedPairConstants {
  double meanAbs = 0.0;     ///< a = E|xi|
  double logTilt = 0.0;     ///< b = ln C
  double gap = 0.0;         ///< d = a - b
  double momentNorm = 0.0;  ///< || |xi| - a ||_p
};
TiltedPairConstants tilted_pair_constants(const DensityModel& base, double p);

struct BoundRow {
  std::string bound;
  long n = 0;
  BoundValue value;
};

/// bound,n,boundValue,clampedFlag
void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows);

}  // namespace mledr
