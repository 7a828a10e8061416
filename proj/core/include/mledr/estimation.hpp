#pragma once

// Maximum-likelihood estimation over Theta = {0..N} x B: profile maximization
// in beta for every level m, then the discrete argmax with a strict tie rule.

#include <span>
#include <string>
#include <vector>

#include "mledr/distributions.hpp"
#include "mledr/param_space.hpp"

namespace mledr {

/// sum_i ln f(x_i; theta) / f(x_i; theta0). Throws DensityZeroError naming
/// the first observation where either density vanishes.
double contrast(std::span<const double> sample, const ParamPoint& theta, const ParamPoint& theta0,
                const ParamSpace& space);

struct ProfileResult {
  std::vector<double> betaHat;
  double value = 0.0;
  bool tieFlag = false;       ///< the contrast was constant over the coarse grid
  bool boundaryFlag = false;  ///< every refined start ended on the box boundary
};

struct OptimizerOptions {
  int gridPointsPerCoordinate = 17;
  int starts = 3;
  int maxIterations = 200;
  double simplexTolerance = 1e-8;  ///< relative to the coordinate range
};

/// Best beta for a fixed level m: grid scan, then Nelder-Mead from the best starts.
ProfileResult profile_mle_continuous(std::span<const double> sample, int m, const ParamSpace& space,
                                     const ParamPoint& theta0, const OptimizerOptions& options = {});

struct MleResult {
  int tauHat = 0;
  std::vector<double> betaHat;
  double logLik = 0.0;  ///< contrast at (tauHat, betaHat)
  std::vector<ProfileResult> profile;  ///< indexed by m
  bool tieFlag = false;
  bool boundaryFlag = false;
};

/// tauHat >= 1 only when some m >= 1 profile strictly exceeds the m = 0
/// profile (beyond 1e-12 relative); ties go to the smallest m.
MleResult mle(std::span<const double> sample, const ParamSpace& space, const ParamPoint& theta0,
              const OptimizerOptions& options = {});

/// Max-norm of the central-difference gradient of the contrast in beta.
/// Throws DomainError when betaHat is on the box boundary.
double stationarity_residual(std::span<const double> sample, const ParamPoint& thetaHat, const ParamSpace& space,
                             const ParamPoint& theta0);

/// a(theta) = E_theta0 ln f(x; theta) / f(x; theta0) = -KL(f_theta0, f_theta).
double expected_contrast_a(const ParamPoint& theta, const ParamPoint& theta0, const ParamSpace& space);

/// tauHat,betaHat...,logLik,tieFlag
std::string to_csv_row(const MleResult& result);

/// Allocation-free classification (tauHat >= 1 ?) for spaces without a beta
/// box; per-observation log-ratios are resolved once.
class PreparedClassifier {
 public:
  PreparedClassifier(const ParamSpace& space, const ParamPoint& theta0);
  PreparedClassifier(const PreparedClassifier&) = delete;
  PreparedClassifier& operator=(const PreparedClassifier&) = delete;
  PreparedClassifier(PreparedClassifier&&) = default;
  /// Same decision as mle(sample, space, theta0).tauHat >= 1.
  bool misclassified(std::span<const double> sample) const;

 private:
  std::vector<DensityModel> models_;
  std::vector<LogRatio> ratios_;
};

}  // namespace mledr
