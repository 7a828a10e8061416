#pragma once

#include <functional>
#include <span>

namespace mledr {

struct QuadratureOptions {
  double absTol = 1e-10;
  double relTol = 0.0;
  int maxIntervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double errorEstimate = 0.0;
  long evaluations = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) integration over [a, b]. Either limit may be
/// infinite; infinite ends are mapped onto finite ones by x = c + tan(t).
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& options = {});

/// Integral over the whole real line, split at the given breakpoints (kinks,
/// centers). Breakpoints need not be sorted or unique.
QuadratureResult integrate_real_line(const Integrand& f, std::span<const double> breakpoints,
                                     const QuadratureOptions& options = {});

/// Integral over [a, inf) of a function with slowly decaying (algebraic) tails:
/// substitutes x = a + e^y - 1 before integrating.
QuadratureResult integrate_heavy_tail(const Integrand& f, double a,
                                      const QuadratureOptions& options = {});

}  // namespace mledr
