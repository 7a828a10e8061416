#include "mledr/interpolation.hpp"

#include <algorithm>
#include <cmath>

// pchip.hpp in Boost 1.74 calls isnan unqualified
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "mledr/error.hpp"

namespace mledr {

struct TabulatedFunction::Impl {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

TabulatedFunction::TabulatedFunction(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size() || x_.size() < 2)
    throw DomainError("TabulatedFunction: need at least two (x, y) pairs of equal length");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw DomainError("TabulatedFunction: grid must be strictly increasing");
  if (x_.size() >= 4) {
    auto xs = x_;
    auto ys = y_;
    impl_ = std::make_shared<const Impl>(Impl{{std::move(xs), std::move(ys)}});
  }
}

double TabulatedFunction::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  if (impl_) return impl_->spline(x);
  // fewer than four knots: piecewise linear
  const std::size_t k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
  const double t = (x - x_[k - 1]) / (x_[k] - x_[k - 1]);
  return y_[k - 1] + t * (y_[k] - y_[k - 1]);
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw DomainError("log_grid: need 0 < lo < hi, count >= 2");
  std::vector<double> g(static_cast<std::size_t>(count));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) g[i] = std::exp(a + (b - a) * i / (count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  if (!(hi > lo) || count < 2) throw DomainError("linear_grid: need lo < hi, count >= 2");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
  g.back() = hi;
  return g;
}

}  // namespace mledr
