#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "mledr/distributions.hpp"
#include "mledr/error.hpp"

namespace mledr {
namespace {

constexpr double kPanel = 0.05;
constexpr int kGradedLevels = 40;
constexpr int kTailTerms = 6;

struct Node {
  double t;
  double w;  // includes the exp(-t^alpha) factor and 1/pi
};

// Gauss-Legendre nodes for (1/pi) int_0^T cos(t x) exp(-t^alpha) dt. The first
// panel is split geometrically toward 0 where t^alpha is not smooth.
std::vector<Node> inversion_nodes(double alpha) {
  using GL = boost::math::quadrature::gauss<double, 10>;
  const auto& abscissa = GL::abscissa();
  const auto& weights = GL::weights();
  std::vector<std::pair<double, double>> panels;
  double hi = kPanel;
  for (int k = 0; k < kGradedLevels; ++k) {
    panels.emplace_back(hi / 2.0, hi);
    hi /= 2.0;
  }
  panels.emplace_back(0.0, hi);
  const double top = std::pow(39.0, 1.0 / alpha);
  for (double a = kPanel; a < top; a += kPanel) panels.emplace_back(a, a + kPanel);

  std::vector<Node> nodes;
  nodes.reserve(panels.size() * 10);
  for (const auto& [a, b] : panels) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      for (double s : {-1.0, 1.0}) {
        if (abscissa[i] == 0.0 && s < 0.0) continue;
        const double t = mid + s * half * abscissa[i];
        nodes.push_back({t, half * weights[i] * std::exp(-std::pow(t, alpha)) / std::numbers::pi});
      }
    }
  }
  return nodes;
}

}  // namespace

struct StableDensityTable::Spline {
  boost::math::interpolators::cardinal_cubic_b_spline<double> fn;
};

StableDensityTable::StableDensityTable(double alpha) : alpha_(alpha) {
  if (!(alpha >= 1.0) || alpha > 2.0)
    throw DomainError("stable density table: alpha must lie in [1, 2] (got " + std::to_string(alpha) + ")");
  const auto nodes = inversion_nodes(alpha);
  const double step = kRange / (kHalfPoints - 1);
  std::vector<double> values(kHalfPoints);
  for (int i = 0; i < kHalfPoints; ++i) {
    const double x = i * step;
    double acc = 0.0;
    for (const auto& nd : nodes) acc += nd.w * std::cos(nd.t * x);
    values[i] = acc;
  }
  for (int k = 1; k <= kTailTerms; ++k) {
    const double c = (k % 2 == 1 ? 1.0 : -1.0) * std::exp(std::lgamma(k * alpha + 1.0) - std::lgamma(k + 1.0)) *
                     std::sin(k * std::numbers::pi * alpha / 2.0) / std::numbers::pi;
    tailCoefficients_.push_back(c);
  }
  spline_ = std::make_shared<const Spline>(
      Spline{{values.data(), values.size(), 0.0, step, 0.0, std::numeric_limits<double>::quiet_NaN()}});
}

double StableDensityTable::log_tail_series(double x) const {
  // asymptotic, relative to the leading term: stop once terms start growing
  const double u = std::pow(x, -alpha_);
  double acc = 0.0, power = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < tailCoefficients_.size(); ++k) {
    power *= u;
    const double term = tailCoefficients_[k] / tailCoefficients_[0] * power;
    if (std::abs(term) > previous) break;
    acc += term;
    if (term != 0.0) previous = std::abs(term);
  }
  if (!(acc > -1.0)) return -std::numeric_limits<double>::infinity();
  return std::log(tailCoefficients_[0]) - (alpha_ + 1.0) * std::log(x) + std::log1p(acc);
}

double StableDensityTable::log_density(double x) const {
  const double a = std::abs(x);
  if (a <= kRange) {
    const double v = spline_->fn(a);
    if (v > 0.0 && std::isfinite(v)) return std::log(v);
  }
  const double l = log_tail_series(a);
  if (l == -std::numeric_limits<double>::infinity())
    throw NumericalError("stable density: table and tail series both failed at x = " + std::to_string(x), 0.0);
  return l;
}

double StableDensityTable::density(double x) const { return std::exp(log_density(x)); }

std::shared_ptr<const StableDensityTable> StableDensityTable::get(double alpha) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const StableDensityTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[alpha];
  if (!slot) slot = std::make_shared<const StableDensityTable>(alpha);
  return slot;
}

}  // namespace mledr
