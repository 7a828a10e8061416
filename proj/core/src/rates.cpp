#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mledr/divergences.hpp"
#include "mledr/error.hpp"
#include "mledr/quadrature.hpp"

namespace mledr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> delta_grid(int count) {
  // dense near 0 where G is small and near 1 where nu* shrinks
  std::vector<double> out = log_grid(1e-4, 0.05, count / 3);
  const auto rest = linear_grid(0.05, 0.99, count - count / 3 + 1);
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

// e^y - 1 - y without cancellation near 0
double expm1_minus(double y) {
  if (std::abs(y) > 0.5) return std::expm1(y) - y;
  double term = 0.5 * y * y, sum = term;
  for (int k = 3; k < 30 && std::abs(term) > 1e-17 * sum; ++k) {
    term *= y / k;
    sum += term;
  }
  return sum;
}

struct LogIntegrand {
  std::function<double(double)> logF0;
  std::function<double(double)> increment;  // centered
  double s;
  double operator()(double x) const {
    const double l = logF0(x);
    if (l == -kInf) return -kInf;
    return l + s * increment(x);
  }
};

// ln int exp(l(x)) dx, with the maximum of l factored out.
double log_integral(const LogIntegrand& l, std::vector<double> breakpoints) {
  double peak = -kInf, argPeak = 0.0;
  auto probe = [&](double x) {
    const double v = l(x);
    if (v > peak) {
      peak = v;
      argPeak = x;
    }
  };
  for (double b : breakpoints) probe(b);
  for (int i = 0; i <= 400; ++i) probe(-100.0 + 0.5 * i);
  for (int k = 2; k <= 12; ++k) {
    probe(std::pow(10.0, k));
    probe(-std::pow(10.0, k));
  }
  // refine the location of the peak
  double step = 0.5;
  for (int it = 0; it < 60 && step > 1e-9; ++it) {
    const double left = l(argPeak - step), right = l(argPeak + step);
    if (left > peak) {
      peak = left;
      argPeak -= step;
    } else if (right > peak) {
      peak = right;
      argPeak += step;
    } else {
      step *= 0.5;
    }
  }
  for (double w : {0.0, 1.0, 5.0, 25.0}) {
    breakpoints.push_back(argPeak - w);
    breakpoints.push_back(argPeak + w);
  }
  QuadratureOptions q;
  q.absTol = 1e-13;
  q.relTol = 1e-11;
  const auto r = integrate_real_line(
      [&](double x) {
        const double v = l(x);
        return v == -kInf ? 0.0 : std::exp(v - peak);
      },
      breakpoints, q);
  return peak + std::log(r.value);
}

}  // namespace

RateFunctions::RateFunctions(const ParamSpace& space, ParamPoint theta0, std::vector<ParamPoint> theta1,
                             const RateOptions& options)
    : space_(&space), theta0_(std::move(theta0)), theta1_(std::move(theta1)), options_(options) {
  if (theta1_.empty()) throw DomainError("rate functions: the alternative grid is empty");
  space.check(theta0_);
  for (const auto& t : theta1_) {
    space.check(t);
    if (t.m < 1) throw DomainError("rate functions: alternative points need m >= 1, got " + to_string(t));
  }
  const std::size_t k = theta1_.size();
  models_.reserve(k + 1);
  models_.push_back(space.model(theta0_));
  for (const auto& t : theta1_) models_.push_back(space.model(t));
  const DensityModel& f0 = models_[0];
  const auto breakpoints = [&] {
    std::vector<double> b;
    for (const auto& m : models_) {
      const auto bp = m.breakpoints();
      b.insert(b.end(), bp.begin(), bp.end());
    }
    return b;
  }();

  std::vector<LogRatio> ratios;
  ratios.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ratios.emplace_back(models_[i + 1], f0);
  auto eta = [&ratios](std::size_t i) {
    return [&ratios, i](double x) {
      const double v = ratios[i](x);
      return std::isnan(v) ? 0.0 : v;
    };
  };

  hr_.resize(k);
  for (std::size_t i = 0; i < k; ++i) hr_[i] = kl_divergence(f0, models_[i + 1]).value;
  hrMin_ = *std::min_element(hr_.begin(), hr_.end());

  // finiteness radius of nu: the moment generating function of eta must exist
  auto finite_at = [&](double s) {
    for (std::size_t i = 0; i < k; ++i) {
      const LogIntegrand l{[&f0](double x) { return f0.log_density(x); }, eta(i), s};
      if (!tail_integrable(std::cref(l))) return false;
    }
    return true;
  };
  if (finite_at(options_.lambdaCap)) {
    lambda0_ = kInf;
    lambdaTop_ = options_.lambdaCap;
  } else {
    double lo = 0.0, hi = options_.lambdaCap;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (finite_at(mid) ? lo : hi) = mid;
    }
    lambda0_ = lo;
    lambdaTop_ = lo * (1.0 - 1e-6);
    if (!(lambdaTop_ > options_.lambdaMin))
      throw DomainError("rate functions: the moment generating function is finite only near 0 (lambda0 = " +
                        std::to_string(lambda0_) + ")");
  }
  lambdaGrid_ = log_grid(options_.lambdaMin, lambdaTop_, options_.lambdaPoints);

  // lower rate: inf over the grid of Lambda*(0)
  lowerRate_ = kInf;
  const auto unit = linear_grid(0.0, 1.0, 21);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& f = models_[i + 1];
    auto lambdaFn = [&](double lambda) {
      if (lambda <= 0.0 || lambda >= 1.0) return 0.0;
      return std::log(hellinger(lambda, f, f0).value);
    };
    lowerRate_ = std::min(lowerRate_, std::max(0.0, legendre_transform(lambdaFn, unit, 0.0).value));
  }

  phiPsi_.reserve(k);
  for (std::size_t i = 0; i < k; ++i) phiPsi_.push_back(tabulate_psi(eta(i), breakpoints));

  std::vector<double> nuX{0.0}, nuY{0.0};
  for (double lambda : lambdaGrid_) {
    double v = 0.0;
    for (std::size_t i = 0; i < k; ++i) v = std::max(v, bar(phiPsi_[i], lambda));
    nuX.push_back(lambda);
    nuY.push_back(v);
  }
  // enforce the monotonicity a supremum of convex functions vanishing at 0 has
  for (std::size_t j = 1; j < nuY.size(); ++j) nuY[j] = std::max(nuY[j], nuY[j - 1]);
  nuValues_ = nuY;
  std::vector<double> logX, scaled;
  for (std::size_t j = 1; j < nuX.size(); ++j) {
    logX.push_back(std::log(nuX[j]));
    scaled.push_back(nuY[j] / (nuX[j] * nuX[j]));
  }
  nuScaled_ = TabulatedFunction(std::move(logX), std::move(scaled));
  nuTable_ = TabulatedFunction(std::move(nuX), std::move(nuY));

  gammaPsi_.resize(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j)
        gammaPsi_[i * k + j] = tabulate_psi(
            [&ratios, i, j](double x) {
              const double v = ratios[i](x) - ratios[j](x);
              return std::isnan(v) ? 0.0 : v;
            },
            breakpoints);

  distances_.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j) distances_[i * k + j] = compute_theta_distance(i, j);
}

RateFunctions::Psi RateFunctions::tabulate_psi(const std::function<double(double)>& increment,
                                               std::span<const double> breakpoints) const {
  const DensityModel& f0 = models_[0];
  auto logF0 = [&f0](double x) { return f0.log_density(x); };
  std::vector<double> bps(breakpoints.begin(), breakpoints.end());
  QuadratureOptions q;
  q.absTol = 1e-13;
  q.relTol = 1e-11;
  const double mean = integrate_real_line(
                          [&](double x) {
                            const double l = logF0(x);
                            return l == -kInf ? 0.0 : std::exp(l) * increment(x);
                          },
                          bps, q)
                          .value;
  auto centered = [&](double x) { return increment(x) - mean; };

  Psi psi;
  double sMax = lambdaTop_;
  const LogIntegrand top{logF0, centered, sMax};
  if (!tail_integrable(std::cref(top))) {
    double lo = 0.0, hi = sMax;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const LogIntegrand l{logF0, centered, mid};
      (tail_integrable(std::cref(l)) ? lo : hi) = mid;
    }
    sMax = lo * (1.0 - 1e-6);
  }
  psi.sMax = sMax;
  const double sMin = options_.lambdaMin / std::sqrt(static_cast<double>(options_.supremumTerms));
  if (!(sMax > sMin)) throw DomainError("rate functions: moment generating function finite only near 0");
  const int count = std::max(8, static_cast<int>(std::ceil(std::log10(sMax / sMin) * options_.psiPointsPerDecade)) + 1);
  const auto sGrid = log_grid(sMin, sMax, count);
  std::vector<double> logS, values;
  for (double s : sGrid) {
    const LogIntegrand l{logF0, centered, s};
    double phi = log_integral(l, bps);
    if (phi < 1.0) {
      // small phi: ln(1 + int f0 (e^{s y} - 1 - s y)), scaled by s^2 to keep the tolerance meaningful
      const auto r = integrate_real_line(
          [&](double x) {
            const double lf = logF0(x);
            if (lf == -kInf) return 0.0;
            const double y = s * centered(x);
            if (y > 30.0) return (std::exp(lf + y) - std::exp(lf) * (1.0 + y)) / (s * s);
            return std::exp(lf) * expm1_minus(y) / (s * s);
          },
          bps, q);
      phi = std::log1p(s * s * r.value);
    }
      logS.push_back(std::log(s));
    values.push_back(std::max(0.0, phi) / (s * s));
  }
  psi.ofLogS = TabulatedFunction(std::move(logS), std::move(values));
  return psi;
}

double RateFunctions::psi_at(const Psi& psi, double s) const {
  if (s > psi.sMax * (1.0 + 1e-12)) return kInf;
  return psi.ofLogS(std::log(s));
}

double RateFunctions::bar(const Psi& psi, double lambda) const {
  if (lambda <= 0.0) return 0.0;
  double best = -kInf, previous = kInf;
  int decreases = 0;
  for (int n = 1; n <= options_.supremumTerms; ++n) {
    const double v = psi_at(psi, lambda / std::sqrt(static_cast<double>(n)));
    if (v == kInf) {
      previous = kInf;
      best = kInf;
      continue;
    }
    // ties count as decreases, so flat sequences stop too
    if (v <= previous + 1e-9 * std::abs(previous)) {
      if (++decreases >= options_.stopAfterDecreases) {
        best = std::max(best, v);
        break;
      }
    } else {
      decreases = 0;
    }
    best = std::max(best, v);
    previous = v;
  }
  return lambda * lambda * best;
}

double RateFunctions::phi(double lambda, std::size_t i) const {
  if (lambda == 0.0) return 0.0;
  return lambda * lambda * psi_at(phiPsi_.at(i), std::abs(lambda));
}

double RateFunctions::phi_bar(double lambda, std::size_t i) const { return bar(phiPsi_.at(i), lambda); }

double RateFunctions::gamma(double lambda, std::size_t i, std::size_t j) const {
  if (lambda == 0.0 || i == j) return 0.0;
  return lambda * lambda * psi_at(gammaPsi_.at(i * theta1_.size() + j), std::abs(lambda));
}

double RateFunctions::gamma_bar(double lambda, std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  return bar(gammaPsi_.at(i * theta1_.size() + j), lambda);
}

double RateFunctions::nu(double lambda) const {
  if (lambda <= 0.0) return 0.0;
  if (lambda > lambdaTop_ * (1.0 + 1e-12)) return kInf;
  return lambda * lambda * nuScaled_(std::log(lambda));
}

double RateFunctions::nu_inverse(double value) const {
  if (value <= 0.0) return 0.0;
  if (value > nuValues_.back()) return kInf;
  double lo = 0.0, hi = lambdaTop_;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (nu(mid) < value ? lo : hi) = mid;
  }
  return hi;
}

double RateFunctions::compute_theta_distance(std::size_t i, std::size_t j) {
  double best = 0.0;
  for (double lambda : lambdaGrid_) {
    const double g = gamma_bar(lambda, i, j);
    if (!(g > 0.0)) continue;
    const double inv = nu_inverse(g);
    if (inv == kInf) {
      nuRangeExceeded_ = true;
      continue;
    }
    best = std::max(best, inv / lambda);
  }
  return best;
}

double RateFunctions::entropy_series_G(double delta) const {
  if (!(delta > 0.0) || !(delta < 1.0)) throw DomainError("G(delta) needs delta in (0, 1)");
  const std::size_t k = theta1_.size();
  if (k == 1) return 0.0;
  double minPositive = kInf;
  for (double v : distances_)
    if (v > 0.0) minPositive = std::min(minPositive, v);
  const double logK = std::log(static_cast<double>(k));
  double sum = 0.0, weight = 1.0, eps = delta;
  for (int m = 1; m < 100000; ++m) {
    const double h = kolmogorov_entropy(distances_, k, eps);
    if (eps < minPositive) {
      // the entropy no longer changes: sum the geometric tail exactly
      sum += h * weight / (1.0 - delta);
      break;
    }
    sum += weight * h;
    weight *= delta;
    eps *= delta;
    if (weight * logK < options_.seriesTolerance) break;
  }
  return sum;
}

double RateFunctions::nu_star(double u) const {
  return legendre_transform([this](double lambda) { return nu(lambda); }, nuTable_.x(), u).value;
}

double RateFunctions::M(double u) const {
  if (!(hrMin_ > 0.0)) throw DomainError("M(u): the minimal relative entropy over the alternatives is 0");
  double best = -kInf;
  for (double delta : delta_grid(options_.deltaPoints))
    best = std::max(best, nu_star(u * (1.0 - delta)) - entropy_series_G(delta));
  return best;
}

double RateFunctions::M_literal(double) const {
  if (!(hrMin_ > 0.0)) throw DomainError("M(u): the minimal relative entropy over the alternatives is 0");
  double best = kInf;
  for (double delta : delta_grid(options_.deltaPoints))
    best = std::min(best, entropy_series_G(delta) - nu_star(hrMin_ * (1.0 - delta)));
  return best;
}

BoundValue RateFunctions::upper_bound_Qn(long n) const {
  if (n < 1) throw DomainError("upper_bound_Qn: n must be at least 1");
  const double m = M(hrMin_ * std::sqrt(static_cast<double>(n)));
  BoundValue b;
  b.logRaw = -m;
  b.raw = std::exp(-m);
  b.clamped = !(m > 0.0);
  b.value = std::min(1.0, b.raw);
  return b;
}

void RateFunctions::write_nu_csv(std::ostream& out) const {
  out << "argument,value,error\n";
  const auto x = nuTable_.x();
  const auto y = nuTable_.y();
  out.precision(17);
  for (std::size_t i = 0; i < x.size(); ++i) out << x[i] << ',' << y[i] << ",0\n";
}

void RateFunctions::write_G_csv(std::ostream& out) const {
  out << "argument,value,error\n";
  out.precision(17);
  for (double delta : delta_grid(options_.deltaPoints))
    out << delta << ',' << entropy_series_G(delta) << ',' << options_.seriesTolerance << '\n';
}

void RateFunctions::write_M_csv(std::ostream& out, std::span<const double> u) const {
  out << "argument,value,error\n";
  out.precision(17);
  for (double v : u) out << v << ',' << M(v) << ",0\n";
}

}  // namespace mledr
