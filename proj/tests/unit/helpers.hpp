#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

/// sup |F_n - F| for the given sample.
inline double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, std::abs((i + 1) / n - f), std::abs(f - i / n)});
  }
  return d;
}

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace testutil
