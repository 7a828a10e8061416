#pragma once

// Probability densities and samplers: the quasi-Gaussian family QN(a, alpha,
// sigma, C1, C2), its product-form mixtures, and the heavy-tailed families used
// for two-hypothesis experiments together with their exponential tilts
// f1(x) = C exp(-|x|) f0(x).

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mledr/interpolation.hpp"
#include "mledr/rng.hpp"

namespace mledr {

struct WeightExponents {
  double alphaNeg = 0.0;  ///< exponent applied for x < 0
  double alphaPos = 0.0;  ///< exponent applied for x > 0

  void validate() const;
  bool operator==(const WeightExponents&) const = default;
};

struct QuasiGaussianParams {
  double center = 0.0;
  WeightExponents exponents;
  double sigma = 1.0;  ///< quasi-standard
  double c1 = 1.0;
  double c2 = 1.0;

  /// Throws DomainError unless sigma > 0, c1, c2 >= 0, c1 + c2 > 0 and the
  /// normalization c1 I(alphaNeg) + c2 I(alphaPos) = sigma sqrt(2 pi) holds to 1e-10.
  void validate() const;
  bool operator==(const QuasiGaussianParams&) const = default;
};

struct MixtureModel {
  std::vector<double> weights;
  /// components[k][j] is the law of coordinate j in component k.
  std::vector<std::vector<QuasiGaussianParams>> components;
  std::size_t dim = 1;

  void validate() const;
  bool operator==(const MixtureModel&) const = default;
};

/// omega(x) = c1 |x|^alphaNeg for x < 0, c2 x^alphaPos for x > 0, 0 at x = 0.
double omega_weight(double x, const WeightExponents& exponents, double c1, double c2);

/// Closed form of the half-line moment integral int_0^inf x^alpha exp(-x^2 / (2 sigma^2)) dx.
double moment_integral(double alpha, double sigma);

enum class FixedSide { C1, C2 };

struct NormalizingConstants {
  double c1;
  double c2;
};

/// Solves c1 I(alphaNeg) + c2 I(alphaPos) = sigma sqrt(2 pi) for the free constant.
/// Throws InfeasibleError when the partner constant would be negative.
NormalizingConstants qg_normalize(const WeightExponents& exponents, double sigma, FixedSide fixedSide,
                                  double fixedValue);

struct PolarCoordinates {
  double rho;
  double angle;  ///< in [0, 2 pi)
};

PolarCoordinates polar_decompose(double x, double y);

class StableDensityTable;
class InverseCdfTable;
class DensityModel;

namespace family {
struct Gaussian {
  double mean = 0.0;
  double sd = 1.0;
};
struct QuasiGaussian {
  QuasiGaussianParams params;
};
struct Mixture {
  MixtureModel model;
};
/// f(x) proportional to exp(-|x / scale|^r).
struct StretchedExp {
  double r = 0.5;
  double scale = 1.0;
};
/// f(x) = C0(p) / ((1 + |x|^(p+1)) ln(e + |x|)^2).
struct PowerTail {
  double p = 3.0;
  double c0 = 0.0;
  std::shared_ptr<const InverseCdfTable> sampler;
};
/// Symmetric stable law with characteristic function exp(-|t|^alpha).
struct Stable {
  double alpha = 1.5;
  std::shared_ptr<const StableDensityTable> table;
};
struct Cauchy {};
/// f1(x) = tiltConstant exp(-|x|) base(x).
struct Tilted {
  std::shared_ptr<const DensityModel> base;
  double tiltConstant = 1.0;
};
}  // namespace family

class DensityModel {
 public:
  using Family = std::variant<family::Gaussian, family::QuasiGaussian, family::Mixture,
                              family::StretchedExp, family::PowerTail, family::Stable,
                              family::Cauchy, family::Tilted>;

  static DensityModel gaussian(double mean = 0.0, double sd = 1.0);
  static DensityModel quasi_gaussian(const QuasiGaussianParams& params);
  static DensityModel mixture(MixtureModel model);
  static DensityModel stretched_exp(double r, double scale = 1.0);
  static DensityModel power_tail(double p);
  static DensityModel stable(double alpha);
  static DensityModel cauchy();
  /// Tilt of `base`; the constant is computed by quadrature.
  static DensityModel tilted(const DensityModel& base);
  static DensityModel tilted(const DensityModel& base, double tiltConstant);

  const Family& family() const { return family_; }
  std::string_view family_name() const;
  std::size_t dim() const;

  double density(double x) const;
  double log_density(double x) const;
  double density(std::span<const double> x) const;
  double log_density(std::span<const double> x) const;

  /// Distribution function of a one-dimensional model (closed form where
  /// available, quadrature otherwise).
  double cdf(double x) const;

  /// Points where the density is not smooth (centers, the origin of tilts).
  std::vector<double> breakpoints() const;

  double sample(RandomStream& rng) const;
  std::vector<double> sample(RandomStream& rng, std::size_t count) const;
  void sample_into(RandomStream& rng, std::span<double> out) const;
  /// Draws of a vector-valued model, row-major count x dim.
  std::vector<double> sample_vectors(RandomStream& rng, std::size_t count) const;

  /// Structural equality (family and parameters).
  bool operator==(const DensityModel& other) const;

 private:
  explicit DensityModel(Family f) : family_(std::move(f)) {}
  Family family_;
};

/// 1 / int exp(-|x|) f0(x) dx; throws NumericalError when quadrature stalls.
double tilt_constant(const DensityModel& base);

/// ln(num(x) / den(x)), exact (ln C - |x|) when one model is the tilt of the other.
double log_density_ratio(const DensityModel& num, const DensityModel& den, double x);

/// Pre-resolved log density ratio for repeated evaluation on samples.
class LogRatio {
 public:
  LogRatio(const DensityModel& num, const DensityModel& den);
  double operator()(double x) const;

 private:
  enum class Kind { Identical, TiltOverBase, BaseOverTilt, General } kind_;
  double logTilt_ = 0.0;
  const DensityModel* num_;
  const DensityModel* den_;
};

/// Numeric symmetric-stable density: characteristic-function inversion on
/// |x| <= 50 (2^15 points over the symmetric range, cubic B-spline) and the
/// asymptotic tail series beyond.
class StableDensityTable {
 public:
  static constexpr double kRange = 50.0;
  static constexpr int kHalfPoints = (1 << 14) + 1;

  explicit StableDensityTable(double alpha);
  double density(double x) const;
  double log_density(double x) const;
  double alpha() const { return alpha_; }

  /// Shared, lazily built table for `alpha` (thread safe).
  static std::shared_ptr<const StableDensityTable> get(double alpha);

 private:
  double log_tail_series(double x) const;
  struct Spline;
  double alpha_;
  std::shared_ptr<const Spline> spline_;
  std::vector<double> tailCoefficients_;
};

/// Inverse-CDF sampler for a symmetric density: survival function tabulated on
/// 4096 knots (uniform in ln(1 + x)), monotone interpolation, power-law extrapolation
/// beyond the last knot.
class InverseCdfTable {
 public:
  static constexpr int kKnots = 4096;
  explicit InverseCdfTable(const std::function<double(double)>& halfDensity, double xMax = 1e8);
  /// |X| with P(|X| > result) = u.
  double sample_abs(double u) const;
  /// P(|X| > x) for x >= 0.
  double abs_survival(double x) const;

 private:
  TabulatedFunction logSurvivalOfY_;  // y = ln(1 + x) -> ln P(|X| > x)
  TabulatedFunction yOfNegLogSurvival_;
  double lastX_ = 0.0;
  double lastLogS_ = 0.0;
  double tailIndex_ = 1.0;
};

}  // namespace mledr
