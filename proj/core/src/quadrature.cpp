#include "mledr/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mledr {
namespace {

struct Rule {
  std::array<double, 8> x{};   // Kronrod abscissae, x[0] = 0
  std::array<double, 8> wk{};  // Kronrod weights
  std::array<double, 8> wg{};  // Gauss weights on the shared nodes, 0 elsewhere
};

const Rule& rule() {
  static const Rule r = [] {
    Rule out;
    const auto& kx = boost::math::quadrature::gauss_kronrod<double, 15>::abscissa();
    const auto& kw = boost::math::quadrature::gauss_kronrod<double, 15>::weights();
    const auto& gx = boost::math::quadrature::gauss<double, 7>::abscissa();
    const auto& gw = boost::math::quadrature::gauss<double, 7>::weights();
    for (std::size_t i = 0; i < 8; ++i) {
      out.x[i] = kx[i];
      out.wk[i] = kw[i];
      for (std::size_t j = 0; j < gx.size(); ++j) {
        if (std::abs(gx[j] - kx[i]) < 1e-14) out.wg[i] = gw[j];
      }
    }
    return out;
  }();
  return r;
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate_panel(const Integrand& f, double a, double b, long& evals) {
  const Rule& r = rule();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = r.wk[0] * fc;
  double g = r.wg[0] * fc;
  for (std::size_t i = 1; i < 8; ++i) {
    const double dx = h * r.x[i];
    const double s = f(c - dx) + f(c + dx);
    k += r.wk[i] * s;
    g += r.wg[i] * s;
  }
  evals += 15;
  k *= h;
  g *= h;
  double err = std::abs(k - g);
  if (!std::isfinite(k)) err = std::numeric_limits<double>::infinity();
  return {a, b, k, err};
}

QuadratureResult adaptive_finite(const Integrand& f, double a, double b, const QuadratureOptions& o) {
  QuadratureResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  std::priority_queue<Panel> heap;
  // start with a few panels so narrow features are not missed by a single rule
  constexpr int kInitial = 4;
  for (int i = 0; i < kInitial; ++i) {
    const double lo = a + (b - a) * i / kInitial;
    const double hi = (i + 1 == kInitial) ? b : a + (b - a) * (i + 1) / kInitial;
    heap.push(evaluate_panel(f, lo, hi, res.evaluations));
  }
  double total = 0.0, err = 0.0;
  auto recompute = [&] {
    auto copy = heap;
    total = 0.0;
    err = 0.0;
    while (!copy.empty()) {
      total += copy.top().value;
      err += copy.top().error;
      copy.pop();
    }
  };
  recompute();
  int intervals = kInitial;
  while (intervals < o.maxIntervals) {
    const double target = std::max(o.absTol, o.relTol * std::abs(total));
    if (err <= target) break;
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // cannot split further
    heap.pop();
    const Panel left = evaluate_panel(f, worst.a, mid, res.evaluations);
    const Panel right = evaluate_panel(f, mid, worst.b, res.evaluations);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    if (intervals % 256 == 0) recompute();  // limit drift of the running sums
  }
  recompute();
  res.value = total;
  res.errorEstimate = err;
  res.converged = std::isfinite(total) && err <= std::max(o.absTol, o.relTol * std::abs(total));
  return res;
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureOptions& o) {
  if (a > b) {
    auto r = integrate(f, b, a, o);
    r.value = -r.value;
    return r;
  }
  constexpr double kHalfPi = std::numbers::pi / 2;
  const bool infA = std::isinf(a);
  const bool infB = std::isinf(b);
  if (!infA && !infB) return adaptive_finite(f, a, b, o);
  if (infA && infB) {
    const double zero[] = {0.0};
    return integrate_real_line(f, zero, o);
  }
  if (infB) {
    auto g = [&](double t) {
      const double x = a + std::tan(t);
      const double c = std::cos(t);
      const double v = f(x);
      return v == 0.0 ? 0.0 : v / (c * c);
    };
    return adaptive_finite(g, 0.0, kHalfPi, o);
  }
  auto g = [&](double t) {
    const double x = b - std::tan(t);
    const double c = std::cos(t);
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (c * c);
  };
  return adaptive_finite(g, 0.0, kHalfPi, o);
}

QuadratureResult integrate_real_line(const Integrand& f, std::span<const double> breakpoints,
                                     const QuadratureOptions& o) {
  std::vector<double> pts;
  for (double p : breakpoints)
    if (std::isfinite(p)) pts.push_back(p);
  if (pts.empty()) pts.push_back(0.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const double inf = std::numeric_limits<double>::infinity();
  QuadratureOptions piece = o;
  const double nPieces = static_cast<double>(pts.size() + 1);
  piece.absTol = o.absTol / nPieces;

  QuadratureResult total;
  total.converged = true;
  auto add = [&](const QuadratureResult& r) {
    total.value += r.value;
    total.errorEstimate += r.errorEstimate;
    total.evaluations += r.evaluations;
    total.converged = total.converged && r.converged;
  };
  add(integrate(f, -inf, pts.front(), piece));
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) add(integrate(f, pts[i], pts[i + 1], piece));
  add(integrate(f, pts.back(), inf, piece));
  total.converged = total.converged && std::isfinite(total.value) &&
                    total.errorEstimate <= std::max(o.absTol, o.relTol * std::abs(total.value));
  return total;
}

QuadratureResult integrate_heavy_tail(const Integrand& f, double a, const QuadratureOptions& o) {
  auto g = [&](double y) {
    const double e = std::exp(y);
    if (!std::isfinite(e)) return 0.0;
    const double v = f(a + std::expm1(y));
    return v == 0.0 ? 0.0 : v * e;
  };
  return integrate(g, 0.0, std::numeric_limits<double>::infinity(), o);
}

}  // namespace mledr
