#pragma once

// Parameter space Theta = {0..N} x B and the rule binding a point (m, beta)
// to a density.

#include <functional>
#include <string>
#include <vector>

#include "mledr/distributions.hpp"

namespace mledr {

struct ParamPoint {
  int m = 0;
  std::vector<double> beta;

  bool operator==(const ParamPoint&) const = default;
};

std::string to_string(const ParamPoint& point);

struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  double width() const { return upper - lower; }
};

/// Maps (m, beta) to a density.
///   fixed:         levels[m], beta ignored
///   location:      levels[m] shifted by beta[0]
///   gaussian_mean: N(m * mu, sigma), mu = beta[0] if present, else step
///   gaussian_sd:   N(m * step, beta[0]) (sd = sigma when beta is empty)
class FamilyBinder {
 public:
  enum class Kind { Fixed, Location, GaussianMean, GaussianSd };

  static FamilyBinder fixed(std::vector<DensityModel> levels);
  static FamilyBinder location(std::vector<DensityModel> levels);
  static FamilyBinder gaussian_mean(double step, double sigma = 1.0);
  static FamilyBinder gaussian_sd(double step, double sigma = 1.0);

  Kind kind() const { return kind_; }
  /// Largest admissible m (levels.size() - 1; unbounded for the Gaussian rules).
  int max_level() const;
  /// Whether the density depends on beta at all.
  bool uses_beta() const { return kind_ != Kind::Fixed; }

  DensityModel model(const ParamPoint& point) const;
  double log_density(const ParamPoint& point, double x) const;

  const std::vector<DensityModel>& levels() const { return levels_; }
  double step() const { return step_; }
  double sigma() const { return sigma_; }

 private:
  FamilyBinder(Kind kind, std::vector<DensityModel> levels, double step, double sigma);
  Kind kind_;
  std::vector<DensityModel> levels_;
  double step_ = 1.0;
  double sigma_ = 1.0;
};

class ParamSpace {
 public:
  /// Throws DomainError on nMax < 0, an empty or inverted box coordinate, or
  /// nMax beyond the binder's levels.
  ParamSpace(int nMax, std::vector<Interval> box, FamilyBinder binder);

  int n_max() const { return nMax_; }
  const std::vector<Interval>& box() const { return box_; }
  std::size_t beta_dim() const { return box_.size(); }
  const FamilyBinder& binder() const { return binder_; }

  /// A theta-independent log factor added to every log-density (a change of
  /// dominating measure); the contrast does not see it.
  void set_reference_log_density(std::function<double(double)> ref) { reference_ = std::move(ref); }
  bool has_reference() const { return static_cast<bool>(reference_); }

  bool contains(const ParamPoint& point) const;
  void check(const ParamPoint& point) const;

  DensityModel model(const ParamPoint& point) const;
  double log_density(const ParamPoint& point, double x) const;

  /// Points (m, beta) for m in [mLo, mHi] and beta on a per-coordinate grid.
  std::vector<ParamPoint> grid(int mLo, int mHi, int pointsPerCoordinate) const;

 private:
  int nMax_;
  std::vector<Interval> box_;
  FamilyBinder binder_;
  std::function<double(double)> reference_;
};

/// Spot check that distinct grid points give distinct densities at 64 probe
/// abscissae; returns false on the first indistinguishable pair.
bool identifiable(const ParamSpace& space, int pointsPerCoordinate = 3);

}  // namespace mledr
