#pragma once

// Replicated simulation of Q_n = P(tauHat_n != 0) and W_n, Wilson intervals,
// empirical moment-generating-function checks and decay-rate fits.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mledr/divergences.hpp"
#include "mledr/estimation.hpp"
#include "mledr/param_space.hpp"

namespace mledr {

struct ExperimentConfig {
  std::shared_ptr<const ParamSpace> space;
  ParamPoint theta0;
  std::vector<long> nGrid;
  long replications = 200000;
  std::uint64_t masterSeed = 20240601;
  double confidenceLevel = 0.99;
  /// Double the replications (up to maxReplications) until hits >= minHits.
  bool adaptive = false;
  long maxReplications = 2000000;
  long minHits = 50;
  /// 0 means one worker per hardware thread.
  int workers = 1;
  OptimizerOptions optimizer;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct QnEstimate {
  long n = 0;
  long hits = 0;
  long replications = 0;
  double pHat = 0.0;
  double wilsonLow = 0.0;
  double wilsonHigh = 1.0;
  long failures = 0;
  /// hits >= minHits; unmeasurable cells are kept in output but not fitted.
  bool measurable = true;
};

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

WilsonInterval wilson_interval(long hits, long replications, double level);

/// One row per n of the grid; bit-identical for any worker count.
std::vector<QnEstimate> estimate_qn(const ExperimentConfig& config);

struct WnEstimate {
  long n = 0;
  long replications = 0;
  long wHits = 0;
  long v1Hits = 0;  ///< event with tauHat = 0
  long v2Hits = 0;  ///< event with tauHat >= 1
  double w = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
};

/// W_n = P(sqrt(n) |betaHat - beta0| > u) and its split by the value of tauHat.
std::vector<WnEstimate> estimate_wn(const ExperimentConfig& config, double u);

enum class RateModel { Exponential, Polynomial, Stretched, Logarithmic };
std::string to_string(RateModel model);

struct RateFit {
  RateModel model = RateModel::Exponential;
  /// exponential: ln Q = a + b n          -> {a, b}
  /// polynomial:  ln Q = a - c ln n       -> {a, c}
  /// stretched:   ln(-ln Q) = a + r ln n  -> {a, r}
  /// logarithmic: ln Q = a + s ln ln n    -> {a, s}  (Q ~ C / ln n when s = -1)
  double intercept = 0.0;
  double parameter = 0.0;
  double rSquared = 0.0;
  bool selected = false;
  std::vector<double> x;  ///< transformed coordinates used in the fit
  std::vector<double> y;
};

struct RateFitSummary {
  std::vector<RateFit> fits;
  std::vector<long> excluded;  ///< n of cells left out (pHat 0 or 1, or unmeasurable)
  const RateFit& selected() const;
  const RateFit& fit(RateModel model) const;
};

/// Least squares in each model's coordinates; the selected model has the
/// highest R^2 up to a 0.01 margin, ties going to the simpler model.
RateFitSummary fit_rate(const std::vector<QnEstimate>& estimates);

struct MgfCheckRow {
  bool increment = false;
  double lambda = 0.0;
  std::size_t i = 0;  ///< index into the alternative grid
  std::size_t j = 0;  ///< second index for increments
  long n = 0;
  double empirical = 1.0;
  double envelope = 1.0;
  double relativeStandardError = 0.0;
  bool pass = true;
  bool inconclusive = false;
};

/// Empirical E exp(lambda zeta_n(theta)) against exp(nu(lambda)) and the
/// increment version against exp(nu(lambda d)), for every grid point and pair.
std::vector<MgfCheckRow> mgf_envelope_check(const ExperimentConfig& config, const RateFunctions& rates,
                                            const std::vector<double>& lambdaGrid);

/// n,hits,reps,pHat,wilsonLow,wilsonHigh with a "# masterSeed=" header.
void write_qn_csv(std::ostream& out, const std::vector<QnEstimate>& estimates, std::uint64_t masterSeed);
std::vector<QnEstimate> read_qn_csv(std::istream& in);
void write_wn_csv(std::ostream& out, const std::vector<WnEstimate>& estimates, double u, std::uint64_t masterSeed);
void write_rates_csv(std::ostream& out, const RateFitSummary& summary);
void write_plotdata_csv(std::ostream& out, const RateFitSummary& summary);

}  // namespace mledr
