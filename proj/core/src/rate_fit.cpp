#include <algorithm>
#include <cmath>

#include "mledr/error.hpp"
#include "mledr/montecarlo.hpp"

namespace mledr {
namespace {

constexpr double kSelectionMargin = 0.01;

void least_squares(RateFit& fit) {
  const double m = static_cast<double>(fit.x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < fit.x.size(); ++i) {
    sx += fit.x[i];
    sy += fit.y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < fit.x.size(); ++i) {
    sxx += (fit.x[i] - mx) * (fit.x[i] - mx);
    sxy += (fit.x[i] - mx) * (fit.y[i] - my);
    syy += (fit.y[i] - my) * (fit.y[i] - my);
  }
  const double slope = sxy / sxx;
  fit.intercept = my - slope * mx;
  fit.parameter = fit.model == RateModel::Polynomial ? -slope : slope;
  double sse = 0;
  for (std::size_t i = 0; i < fit.x.size(); ++i) {
    const double r = fit.y[i] - (fit.intercept + slope * fit.x[i]);
    sse += r * r;
  }
  fit.rSquared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
}

}  // namespace

std::string to_string(RateModel model) {
  switch (model) {
    case RateModel::Exponential:
      return "exponential";
    case RateModel::Polynomial:
      return "polynomial";
    case RateModel::Stretched:
      return "stretched";
    case RateModel::Logarithmic:
      return "logarithmic";
  }
  return "unknown";
}

const RateFit& RateFitSummary::selected() const {
  for (const auto& f : fits)
    if (f.selected) return f;
  throw DomainError("rate fit summary has no selected model");
}

const RateFit& RateFitSummary::fit(RateModel model) const {
  for (const auto& f : fits)
    if (f.model == model) return f;
  throw DomainError("rate fit summary has no " + to_string(model) + " fit");
}

RateFitSummary fit_rate(const std::vector<QnEstimate>& estimates) {
  RateFitSummary out;
  std::vector<const QnEstimate*> usable;
  for (const auto& e : estimates) {
    if (e.measurable && e.pHat > 0.0 && e.pHat < 1.0 && e.n >= 1)
      usable.push_back(&e);
    else
      out.excluded.push_back(e.n);
  }
  if (usable.size() < 4)
    throw DomainError("fit_rate: " + std::to_string(usable.size()) + " usable cells, at least 4 are needed");

  for (auto model : {RateModel::Exponential, RateModel::Polynomial, RateModel::Stretched, RateModel::Logarithmic}) {
    RateFit fit;
    fit.model = model;
    for (const auto* e : usable) {
      const double n = static_cast<double>(e->n), q = e->pHat;
      switch (model) {
        case RateModel::Exponential:
          fit.x.push_back(n);
          fit.y.push_back(std::log(q));
          break;
        case RateModel::Polynomial:
          fit.x.push_back(std::log(n));
          fit.y.push_back(std::log(q));
          break;
        case RateModel::Stretched:
          fit.x.push_back(std::log(n));
          fit.y.push_back(std::log(-std::log(q)));
          break;
        case RateModel::Logarithmic:
          if (e->n < 2) continue;  // ln ln n needs n >= 2
          fit.x.push_back(std::log(std::log(n)));
          fit.y.push_back(std::log(q));
          break;
      }
    }
    if (fit.x.size() < 2) continue;
    least_squares(fit);
    out.fits.push_back(std::move(fit));
  }
  double best = 0.0;
  for (const auto& f : out.fits) best = std::max(best, f.rSquared);
  for (auto& f : out.fits)
    if (f.rSquared >= best - kSelectionMargin) {
      f.selected = true;
      break;
    }
  return out;
}

}  // namespace mledr
