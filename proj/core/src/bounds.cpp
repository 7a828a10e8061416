#include "mledr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mledr/error.hpp"
#include "mledr/quadrature.hpp"

namespace mledr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BoundValue from_log(double logRaw) {
  BoundValue b;
  b.logRaw = logRaw;
  b.raw = std::exp(logRaw);
  b.clamped = logRaw >= 0.0;
  b.value = std::min(1.0, b.raw);
  return b;
}

double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

BoundValue rosenthal_bound(double p, double momentNorm, double d, long n) {
  if (!(p > 2.0)) throw DomainError("rosenthal_bound: p must exceed 2");
  if (n < 1) throw DomainError("rosenthal_bound: n must be at least 1");
  if (!(momentNorm > 0.0) || !(d > 0.0)) throw DomainError("rosenthal_bound: moment norm and d must be positive");
  const double logRaw = p * (std::log(kRosenthalConstant) + std::log(momentNorm) + std::log(p) - std::log(d) -
                             std::log(std::log(p))) -
                        0.5 * p * std::log(static_cast<double>(n));
  return from_log(logRaw);
}

PsiFunction PsiFunction::analytic(std::function<double(double)> psi, double a, double b, double norm) {
  if (!(a >= 2.0) || !(b > a)) throw DomainError("psi function: need 2 <= a < b");
  PsiFunction f;
  f.a = a;
  f.b = b;
  f.psi = std::move(psi);
  f.norm = norm;
  const double top = std::isfinite(b) ? b : std::max(a * 500.0, 1000.0);
  f.grid = log_grid(a * (1.0 + 1e-9), std::isfinite(b) ? top * (1.0 - 1e-9) : top, 400);
  return f;
}

bool PsiFunction::log_convex(double slack) const {
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double x0 = grid[i - 1], x1 = grid[i], x2 = grid[i + 1];
    const double y0 = x0 * std::log(psi(x0)), y1 = x1 * std::log(psi(x1)), y2 = x2 * std::log(psi(x2));
    // value at x1 must not exceed the chord
    const double chord = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0);
    if (y1 > chord + slack * std::max(1.0, std::abs(chord))) return false;
  }
  return true;
}

double log_abs_moment(const DensityModel& model, double p, double center) {
  if (model.dim() != 1) throw DomainError("log_abs_moment: model must be one-dimensional");
  auto l = [&](double x) {
    const double lf = model.log_density(x);
    const double ax = std::abs(x - center);
    if (lf == -kInf) return -kInf;
    if (ax == 0.0) return p > 0.0 ? -kInf : lf;
    return lf + p * std::log(ax);
  };
  if (!tail_integrable(l)) return kInf;
  double peak = -kInf, argPeak = center;
  for (int i = -400; i <= 400; ++i) {
    const double x = center + 0.25 * i;
    const double v = l(x);
    if (v > peak) {
      peak = v;
      argPeak = x;
    }
  }
  for (int k = 2; k <= 12; ++k)
    for (double s : {-1.0, 1.0}) {
      const double x = center + s * std::pow(10.0, k);
      const double v = l(x);
      if (v > peak) {
        peak = v;
        argPeak = x;
      }
    }
  QuadratureOptions q;
  q.absTol = 1e-14;
  q.relTol = 1e-11;
  auto shifted = [&](double x) { return std::exp(l(x) - peak); };
  auto mirrored = [&](double x) { return std::exp(l(2.0 * center - x) - peak); };
  // inner panel split at the peak, algebraic-tail substitution beyond
  const double reach = std::max(1.0, std::abs(argPeak - center) + 5.0);
  const double lo = center - reach, hi = center + reach;
  double total = integrate(shifted, lo, center, q).value + integrate(shifted, center, hi, q).value;
  if (argPeak > center && argPeak < hi)
    total = integrate(shifted, lo, center, q).value + integrate(shifted, center, argPeak, q).value +
            integrate(shifted, argPeak, hi, q).value;
  else if (argPeak < center && argPeak > lo)
    total = integrate(shifted, lo, argPeak, q).value + integrate(shifted, argPeak, center, q).value +
            integrate(shifted, center, hi, q).value;
  total += integrate_heavy_tail(shifted, hi, q).value;
  total += integrate_heavy_tail(mirrored, hi, q).value;
  return peak + std::log(total);
}

PsiFunction gl_natural_psi(const DensityModel& model, const std::vector<double>& pGrid) {
  if (pGrid.size() < 2) throw DomainError("gl_natural_psi: need at least two grid points");
  std::vector<double> ps, logPsi;
  double b = kInf;
  for (double p : pGrid) {
    if (!(p >= 2.0)) throw DomainError("gl_natural_psi: grid points must be >= 2");
    const double lm = log_abs_moment(model, p);
    if (lm == kInf) {
      // the domain ends between the last finite point and p
      double lo = ps.empty() ? 2.0 : ps.back(), hi = p;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (log_abs_moment(model, mid) < kInf ? lo : hi) = mid;
      }
      b = hi;
      break;
    }
    ps.push_back(p);
    logPsi.push_back(lm / p);
  }
  if (ps.size() < 2) throw DomainError("gl_natural_psi: moments diverge on almost the whole grid");
  PsiFunction f;
  f.a = ps.front();
  f.b = b;
  f.provenance = PsiProvenance::NaturalFromMoments;
  f.norm = 1.0;
  auto table = std::make_shared<TabulatedFunction>(ps, logPsi);
  f.psi = [table](double p) { return std::exp((*table)(p)); };
  f.grid = ps;
  return f;
}

BoundValue gl_bound(const PsiFunction& psi, double d, long n) {
  if (n < 1) throw DomainError("gl_bound: n must be at least 1");
  if (!(d > 0.0)) throw DomainError("gl_bound: d must be positive");
  std::vector<double> grid;
  for (double p : psi.grid)
    if (p > psi.a - 1e-12 && p < psi.b && p > 1.0) grid.push_back(p);
  if (grid.size() < 2) throw DomainError("gl_bound: empty effective Legendre domain");
  auto psi2 = [&](double p) {
    const double psi1 = kRosenthalConstant * psi.psi(p) * p / (d * std::log(p));
    return p * std::log(psi1);
  };
  const double z = std::log(std::sqrt(static_cast<double>(n)) / psi.norm);
  const auto t = legendre_transform(psi2, grid, z);
  return from_log(-t.value);
}

BoundValue martingale_moment_bound(double p, const std::vector<double>& norms, double d, long n) {
  if (!(p >= 2.0)) throw DomainError("martingale_moment_bound: p must be at least 2");
  if (n < 1 || norms.size() != static_cast<std::size_t>(n))
    throw DomainError("martingale_moment_bound: need one moment norm per observation");
  if (!(d > 0.0)) throw DomainError("martingale_moment_bound: d must be positive");
  double meanSquare = 0.0;
  for (double s : norms) meanSquare += s * s;
  meanSquare /= static_cast<double>(n);
  const double logRaw = -p * std::log(d) + p * std::log(p - 1.0) - 0.5 * p * std::log(static_cast<double>(n)) +
                        0.5 * p * std::log(meanSquare);
  return from_log(logRaw);
}

TailFunction TailFunction::weibull(double q, double K) {
  if (!(q > 0.0) || !(K > 0.0)) throw DomainError("weibull tail: q and K must be positive");
  return TailFunction{[q, K](double x) { return x <= 0.0 ? 0.0 : -std::pow(x / K, q); }};
}

double TailFunction::operator()(double x) const { return std::exp(logT(x)); }

BoundValue tail_transform_W(const TailFunction& T, double x) {
  if (!(x > 0.0)) throw DomainError("tail_transform_W: x must be positive");
  constexpr int kVPoints = 400, kRefine = 10;
  const auto v = log_grid(1e-3, 1e3, kVPoints);
  // partition: the v-grid refined kRefine times and continued to 1e6
  std::vector<double> t;
  for (int i = 0; i + 1 < kVPoints; ++i)
    for (int r = 0; r < kRefine; ++r) t.push_back(v[i] * std::pow(v[i + 1] / v[i], static_cast<double>(r) / kRefine));
  const auto tail = log_grid(1e3, 1e6, 30 * kRefine);
  t.insert(t.end(), tail.begin(), tail.end());

  // logS[i] = ln sum_{k >= i} t_mid^2 (T(t_k) - T(t_{k+1})), built from the top
  std::vector<double> logT(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) logT[i] = T.logT(t[i]);
  for (std::size_t i = 1; i < t.size(); ++i)
    if (logT[i] > logT[i - 1] + 1e-12) throw DomainError("tail_transform_W: T must be nonincreasing");
  std::vector<double> logS(t.size(), -kInf);
  // remainder beyond the last point: at least t^2 T(t)
  logS.back() = 2.0 * std::log(t.back()) + logT.back();
  for (std::size_t i = t.size() - 1; i-- > 0;) {
    const double diff = logT[i + 1] - logT[i];
    double term = -kInf;
    if (diff < 0.0) term = logT[i] + std::log(-std::expm1(diff)) + 2.0 * std::log(0.5 * (t[i] + t[i + 1]));
    logS[i] = log_sum_exp(logS[i + 1], term);
  }
  if (!std::isfinite(logS.front()) && logS.front() > 0.0)
    throw NumericalError("tail_transform_W: the second-moment Stieltjes integral is not finite", kInf);

  double best = kInf;
  for (int i = 0; i < kVPoints; ++i) {
    const double gaussian = -x * x / (8.0 * v[i] * v[i]);
    best = std::min(best, log_sum_exp(gaussian, logS[static_cast<std::size_t>(i) * kRefine]));
  }
  return from_log(best);
}

double baum_katz_shape(double p, long n) { return std::pow(static_cast<double>(n), -(p - 2.0)); }

TiltedPairConstants tilted_pair_constants(const DensityModel& base, double p) {
  TiltedPairConstants c;
  c.meanAbs = std::exp(log_abs_moment(base, 1.0));
  c.logTilt = std::log(tilt_constant(base));
  c.gap = c.meanAbs - c.logTilt;
  // || |xi| - a ||_p by quadrature over the half line (the base is symmetric)
  const double a = c.meanAbs;
  auto l = [&](double x) {
    const double lf = base.log_density(x);
    const double dev = std::abs(std::abs(x) - a);
    if (lf == -kInf || dev == 0.0) return -kInf;
    return lf + p * std::log(dev);
  };
  if (!tail_integrable(l)) {
    c.momentNorm = kInf;
    return c;
  }
  QuadratureOptions q;
  q.absTol = 1e-14;
  q.relTol = 1e-11;
  auto f = [&](double x) { return std::exp(l(x)); };
  double total = integrate(f, 0.0, a, q).value + integrate(f, a, a + 1.0, q).value +
                 integrate_heavy_tail(f, a + 1.0, q).value;
  c.momentNorm = std::pow(2.0 * total, 1.0 / p);
  return c;
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows) {
  out << "bound,n,boundValue,clampedFlag\n";
  out.precision(17);
  for (const auto& r : rows) out << r.bound << ',' << r.n << ',' << r.value.value << ',' << (r.value.clamped ? 1 : 0) << '\n';
}

}  // namespace mledr
