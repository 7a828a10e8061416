#pragma once

// Divergences between densities, Hellinger integrals, Legendre transforms,
// covering entropy and the rate functions that bound the misclassification
// probability Q_n.

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "mledr/distributions.hpp"
#include "mledr/interpolation.hpp"
#include "mledr/param_space.hpp"

namespace mledr {

struct DivergenceOptions {
  double absTol = 1e-10;
  double relTol = 0.0;
};

struct DivergenceResult {
  double value = 0.0;
  double absoluteErrorEstimate = 0.0;
  long nodesUsed = 0;
  /// Set when the integral diverges (value +inf); for Hellinger integrals
  /// this marks the lambda the call was made with.
  bool divergent = false;
};

/// int f ln(f / g).
DivergenceResult kl_divergence(const DensityModel& f, const DensityModel& g, const DivergenceOptions& options = {});
/// int f ln(g / h).
DivergenceResult relative_entropy3(const DensityModel& f, const DensityModel& g, const DensityModel& h,
                                   const DivergenceOptions& options = {});
/// int f^lambda g^(1 - lambda).
DivergenceResult hellinger(double lambda, const DensityModel& f, const DensityModel& g,
                           const DivergenceOptions& options = {});
/// int f^lambda g^(-lambda) h.
DivergenceResult hellinger3(double lambda, const DensityModel& f, const DensityModel& g, const DensityModel& h,
                            const DivergenceOptions& options = {});

/// Lambda(lambda; theta) = ln int f_theta^lambda f_theta0^(1 - lambda).
double deviation_function(double lambda, const ParamPoint& theta, const ParamPoint& theta0, const ParamSpace& space);

struct LegendreResult {
  double value = 0.0;
  double argmax = 0.0;
  /// The supremum sits on the end of the grid and is still increasing there.
  bool unbounded = false;
};

/// sup over the grid of (u z - fn(z)), refined by golden-section search
/// between the neighbours of the best grid point.
LegendreResult legendre_transform(const std::function<double(double)>& fn, std::span<const double> grid, double u);
LegendreResult legendre_transform(const TabulatedFunction& fn, double u);

/// inf over m >= 1 and a beta grid of Lambda*(0; m, beta).
double lower_bound_rate(const ParamSpace& space, const ParamPoint& theta0, int betaPointsPerCoordinate = 17);

/// Integrand-growth test: true when exp(logIntegrand) is integrable at +-infinity.
bool tail_integrable(const std::function<double(double)>& logIntegrand);

/// ln of a covering count of `count` points by closed balls {y : d(x, y) <= epsilon}:
/// exact for up to 16 points, greedy set cover beyond (an upper bound).
/// Nonincreasing in epsilon.
double kolmogorov_entropy(std::size_t count, const std::function<double(std::size_t, std::size_t)>& distance,
                          double epsilon);
/// Same, on a precomputed distance matrix (row-major count x count).
double kolmogorov_entropy(std::span<const double> distanceMatrix, std::size_t count, double epsilon);

struct RateOptions {
  int supremumTerms = 10000;     ///< N_max of the n-supremum
  int stopAfterDecreases = 10;   ///< monotone-tail stopping rule
  int lambdaPoints = 200;
  double lambdaMin = 1e-4;
  double lambdaCap = 50.0;       ///< upper end when lambda0 is infinite
  int psiPointsPerDecade = 16;
  int betaPointsPerCoordinate = 17;
  int deltaPoints = 99;
  double seriesTolerance = 1e-12;
};

/// Value of a probability bound and whether it was clamped to 1.
struct BoundValue {
  double value = 1.0;
  double raw = 1.0;
  double logRaw = 0.0;  ///< ln raw, finite even when raw underflows
  bool clamped = false;
};

/// Tabulated rate functions of a parameter space: phi, phi-bar, nu, gamma,
/// gamma-bar, the distance d on Theta_1, G(delta), M(u) and the upper bound
/// on Q_n.
class RateFunctions {
 public:
  /// theta1 is the evaluation grid of the alternative set.
  RateFunctions(const ParamSpace& space, ParamPoint theta0, std::vector<ParamPoint> theta1,
                const RateOptions& options = {});

  double lambda0() const { return lambda0_; }
  std::span<const double> lambda_grid() const { return lambdaGrid_; }
  const std::vector<ParamPoint>& theta1() const { return theta1_; }

  /// H_r(theta) = KL(f_theta0, f_theta).
  double relative_entropy(std::size_t thetaIndex) const { return hr_[thetaIndex]; }
  /// inf of H_r over the Theta_1 grid.
  double min_relative_entropy() const { return hrMin_; }
  double lower_rate() const { return lowerRate_; }

  double phi(double lambda, std::size_t thetaIndex) const;
  double phi_bar(double lambda, std::size_t thetaIndex) const;
  double nu(double lambda) const;
  double nu_inverse(double value) const;
  /// Set when some gamma-bar value exceeded the tabulated range of nu while
  /// building the distance matrix.
  bool nu_range_exceeded() const { return nuRangeExceeded_; }

  double gamma(double lambda, std::size_t i, std::size_t j) const;
  double gamma_bar(double lambda, std::size_t i, std::size_t j) const;

  double theta_distance(std::size_t i, std::size_t j) const { return distances_[i * theta1_.size() + j]; }
  /// d(theta_i, theta_j) for every pair, row-major.
  const std::vector<double>& distance_matrix() const { return distances_; }

  double entropy_series_G(double delta) const;
  /// sup over delta of [nu*(u (1 - delta)) - G(delta)].
  double M(double u) const;
  /// inf over delta of [G(delta) - nu*(H_r (1 - delta))]; u does not enter.
  double M_literal(double u) const;
  /// min(1, exp(-M(H_r sqrt(n)))); clamped when M <= 0.
  BoundValue upper_bound_Qn(long n) const;

  double nu_star(double u) const;

  /// argument,value,error rows.
  void write_nu_csv(std::ostream& out) const;
  void write_G_csv(std::ostream& out) const;
  void write_M_csv(std::ostream& out, std::span<const double> u) const;

 private:
  struct Psi {
    TabulatedFunction ofLogS;  // ln s -> phi(s) / s^2
    double sMax = 0.0;         // +inf beyond
  };
  Psi tabulate_psi(const std::function<double(double)>& increment, std::span<const double> breakpoints) const;
  double compute_theta_distance(std::size_t i, std::size_t j);
  double bar(const Psi& psi, double lambda) const;
  double psi_at(const Psi& psi, double s) const;

  const ParamSpace* space_;
  ParamPoint theta0_;
  std::vector<ParamPoint> theta1_;
  RateOptions options_;
  double lambda0_ = std::numeric_limits<double>::infinity();
  double lambdaTop_ = 0.0;
  std::vector<double> lambdaGrid_;
  std::vector<double> hr_;
  double hrMin_ = 0.0;
  double lowerRate_ = 0.0;
  std::vector<Psi> phiPsi_;
  std::vector<double> nuValues_;
  TabulatedFunction nuTable_;
  TabulatedFunction nuScaled_;  // ln lambda -> nu(lambda) / lambda^2
  std::vector<Psi> gammaPsi_;  // row-major pairs
  std::vector<double> distances_;
  std::vector<DensityModel> models_;  // theta0 first, then theta1
  bool nuRangeExceeded_ = false;
};

}  // namespace mledr
