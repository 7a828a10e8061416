#pragma once

#include <memory>
#include <span>
#include <vector>

namespace mledr {

/// A function tabulated on a strictly increasing grid and evaluated by
/// monotone piecewise-cubic Hermite (PCHIP) interpolation. Arguments outside
/// the grid are clamped to the nearest end.
class TabulatedFunction {
 public:
  TabulatedFunction() = default;
  TabulatedFunction(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;

  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }
  bool empty() const { return x_.empty(); }
  double front_x() const { return x_.front(); }
  double back_x() const { return x_.back(); }

 private:
  struct Impl;
  std::vector<double> x_;
  std::vector<double> y_;
  std::shared_ptr<const Impl> impl_;
};

/// Logarithmically spaced grid of `count` points on [lo, hi] (lo > 0).
std::vector<double> log_grid(double lo, double hi, int count);

/// Uniformly spaced grid of `count` points on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int count);

}  // namespace mledr
