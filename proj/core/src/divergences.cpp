#include "mledr/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mledr/error.hpp"
#include "mledr/quadrature.hpp"

namespace mledr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDivergenceCeiling = 1e6;
constexpr double kGolden = 0.6180339887498949;

std::vector<double> merged_breakpoints(std::initializer_list<const DensityModel*> models) {
  std::vector<double> out;
  for (const auto* m : models) {
    const auto b = m->breakpoints();
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

void require_scalar(std::initializer_list<const DensityModel*> models) {
  for (const auto* m : models)
    if (m->dim() != 1) throw DomainError("divergences are computed for one-dimensional models");
}

// Integrates exp(logWeight(x)) * factor(x) over the real line; factor == nullptr means 1.
DivergenceResult integrate_weighted(const std::function<double(double)>& logWeight,
                                    const std::function<double(double)>& factor, std::vector<double> breakpoints,
                                    const DivergenceOptions& options) {
  auto logAbs = [&](double x) {
    const double lw = logWeight(x);
    if (!factor) return lw;
    const double fv = std::abs(factor(x));
    return fv > 0.0 ? lw + std::log(fv) : -kInf;
  };
  DivergenceResult r;
  if (!tail_integrable(logAbs)) {
    r.value = kInf;
    r.divergent = true;
    return r;
  }
  QuadratureOptions q;
  q.absTol = options.absTol;
  q.relTol = options.relTol;
  const auto res = integrate_real_line(
      [&](double x) {
        const double lw = logWeight(x);
        if (lw == -kInf) return 0.0;
        const double w = std::exp(lw);
        return factor ? w * factor(x) : w;
      },
      breakpoints, q);
  r.value = res.value;
  r.absoluteErrorEstimate = res.errorEstimate;
  r.nodesUsed = res.evaluations;
  if (!std::isfinite(res.value) || std::abs(res.value) > kDivergenceCeiling) {
    r.value = kInf;
    r.divergent = true;
    return r;
  }
  if (!res.converged)
    throw NumericalError("divergence quadrature did not reach tolerance (error estimate " +
                             std::to_string(res.errorEstimate) + ")",
                         res.errorEstimate);
  return r;
}

// Difference of log-densities that is exact for tilted pairs and 0 where both vanish.
double log_difference(const LogRatio& ratio, double x) {
  const double v = ratio(x);
  return std::isnan(v) ? 0.0 : v;
}

}  // namespace

bool tail_integrable(const std::function<double(double)>& logIntegrand) {
  static const double exponents[] = {16.0, 32.0, 64.0, 128.0};
  for (double sign : {-1.0, 1.0}) {
    double previous = -kInf;
    for (double k : exponents) {
      const double x = sign * std::pow(10.0, k);
      const double l = logIntegrand(x);
      if (std::isnan(l)) continue;
      if (l == kInf) return false;
      const double g = l + k * std::log(10.0);
      // |x| times the integrand must keep falling: a drop of at least 1 per
      // doubling of the decade accepts 1/(x ln^2 x) and rejects 1/x, 1/(x ln x)
      if (g > 50.0) return false;
      if (k > 16.0 && g > previous - 1.0 && g > -700.0) return false;
      previous = g;
    }
  }
  return true;
}

DivergenceResult kl_divergence(const DensityModel& f, const DensityModel& g, const DivergenceOptions& options) {
  require_scalar({&f, &g});
  if (f == g) return {};
  const LogRatio ratio(f, g);
  auto r = integrate_weighted([&](double x) { return f.log_density(x); },
                              [&](double x) { return log_difference(ratio, x); },
                              merged_breakpoints({&f, &g}), options);
  if (!r.divergent) r.value = std::max(0.0, r.value);
  return r;
}

DivergenceResult relative_entropy3(const DensityModel& f, const DensityModel& g, const DensityModel& h,
                                   const DivergenceOptions& options) {
  require_scalar({&f, &g, &h});
  if (g == h) return {};
  const LogRatio ratio(g, h);
  return integrate_weighted([&](double x) { return f.log_density(x); },
                            [&](double x) { return log_difference(ratio, x); },
                            merged_breakpoints({&f, &g, &h}), options);
}

DivergenceResult hellinger(double lambda, const DensityModel& f, const DensityModel& g,
                           const DivergenceOptions& options) {
  require_scalar({&f, &g});
  if (lambda == 0.0 || lambda == 1.0 || f == g) return {1.0, 0.0, 0, false};
  const LogRatio ratio(f, g);
  return integrate_weighted([&](double x) { return g.log_density(x) + lambda * log_difference(ratio, x); },
                            nullptr, merged_breakpoints({&f, &g}), options);
}

DivergenceResult hellinger3(double lambda, const DensityModel& f, const DensityModel& g, const DensityModel& h,
                            const DivergenceOptions& options) {
  require_scalar({&f, &g, &h});
  if (lambda == 0.0 || f == g) return {1.0, 0.0, 0, false};
  const LogRatio ratio(f, g);
  return integrate_weighted([&](double x) { return h.log_density(x) + lambda * log_difference(ratio, x); },
                            nullptr, merged_breakpoints({&f, &g, &h}), options);
}

double deviation_function(double lambda, const ParamPoint& theta, const ParamPoint& theta0, const ParamSpace& space) {
  if (lambda == 0.0 || theta == theta0) return 0.0;
  return std::log(hellinger(lambda, space.model(theta), space.model(theta0)).value);
}

LegendreResult legendre_transform(const std::function<double(double)>& fn, std::span<const double> grid, double u) {
  std::vector<double> g;
  g.reserve(grid.size());
  std::size_t best = grid.size();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = fn(grid[k]);
    g.push_back(std::isfinite(v) ? u * grid[k] - v : -kInf);
    if (g.back() > -kInf && (best == grid.size() || g.back() > g[best])) best = k;
  }
  if (best == grid.size()) throw DomainError("legendre_transform: function is not finite anywhere on the grid");

  LegendreResult r{g[best], grid[best], false};
  const std::size_t last = grid.size() - 1;
  if ((best == 0 && grid.size() > 1 && g[0] > g[1]) || (best == last && last > 0 && g[last] > g[last - 1])) {
    r.unbounded = true;
    return r;
  }
  if (grid.size() < 3) return r;
  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[best == last ? last : best + 1];
  auto obj = [&](double z) {
    const double v = fn(z);
    return std::isfinite(v) ? u * z - v : -kInf;
  };
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = obj(c), fd = obj(d);
  const double tol = 1e-12 * std::max(1.0, std::abs(b) + std::abs(a));
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = obj(d);
    }
  }
  const double z = 0.5 * (a + b);
  const double v = obj(z);
  if (v > r.value) {
    r.value = v;
    r.argmax = z;
  }
  return r;
}

LegendreResult legendre_transform(const TabulatedFunction& fn, double u) {
  return legendre_transform([&fn](double z) { return fn(z); }, fn.x(), u);
}

double lower_bound_rate(const ParamSpace& space, const ParamPoint& theta0, int betaPointsPerCoordinate) {
  if (space.n_max() < 1) throw DomainError("lower_bound_rate: the space has no alternative m >= 1");
  const auto grid = linear_grid(0.0, 1.0, 21);
  const auto f0 = space.model(theta0);
  double best = kInf;
  for (const auto& theta : space.grid(1, space.n_max(), space.beta_dim() == 0 ? 1 : betaPointsPerCoordinate)) {
    const auto f = space.model(theta);
    auto lambdaFn = [&](double lambda) {
      if (lambda <= 0.0 || lambda >= 1.0) return 0.0;
      return std::log(hellinger(lambda, f, f0).value);
    };
    best = std::min(best, legendre_transform(lambdaFn, grid, 0.0).value);
  }
  return std::max(0.0, best);
}

}  // namespace mledr
