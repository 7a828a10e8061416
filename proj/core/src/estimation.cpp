#include "mledr/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mledr/divergences.hpp"
#include "mledr/error.hpp"

namespace mledr {
namespace {

constexpr double kTieTolerance = 1e-12;

bool strictly_greater(double a, double b) {
  return a - b > kTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

// sum_i ln f(x_i; theta), throwing on a vanishing density.
double log_likelihood(std::span<const double> sample, const ParamPoint& theta, const ParamSpace& space) {
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double l = space.log_density(theta, sample[i]);
    if (!(l > -std::numeric_limits<double>::infinity()))
      throw DensityZeroError("density of " + to_string(theta) + " vanishes at observation " + std::to_string(i) +
                                 " (x = " + std::to_string(sample[i]) + ")",
                             i);
    acc += l;
  }
  return acc;
}

bool on_boundary(const std::vector<double>& beta, const std::vector<Interval>& box) {
  for (std::size_t j = 0; j < box.size(); ++j) {
    const double eps = 1e-6 * box[j].width();
    if (beta[j] - box[j].lower <= eps || box[j].upper - beta[j] <= eps) return true;
  }
  return false;
}

void clamp_to_box(std::vector<double>& beta, const std::vector<Interval>& box) {
  for (std::size_t j = 0; j < box.size(); ++j) beta[j] = std::clamp(beta[j], box[j].lower, box[j].upper);
}

struct Vertex {
  std::vector<double> x;
  double f;  // objective to minimize
};

// Nelder-Mead on the box (trial points are projected onto it).
Vertex nelder_mead(const std::function<double(const std::vector<double>&)>& objective, std::vector<double> start,
                   const std::vector<Interval>& box, const OptimizerOptions& options, double initialStepFraction) {
  const std::size_t d = start.size();
  std::vector<Vertex> simplex;
  simplex.push_back({start, objective(start)});
  for (std::size_t j = 0; j < d; ++j) {
    auto x = start;
    const double h = initialStepFraction * box[j].width();
    x[j] = x[j] + h <= box[j].upper ? x[j] + h : x[j] - h;
    clamp_to_box(x, box);
    simplex.push_back({x, objective(x)});
  }
  auto evaluate = [&](std::vector<double> x) {
    clamp_to_box(x, box);
    const double f = objective(x);
    return Vertex{std::move(x), f};
  };
  auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  order();
  for (int it = 0; it < options.maxIterations; ++it) {
    double spread = 0.0;
    for (std::size_t v = 1; v <= d; ++v)
      for (std::size_t j = 0; j < d; ++j)
        spread = std::max(spread, std::abs(simplex[v].x[j] - simplex[0].x[j]) / box[j].width());
    if (spread < options.simplexTolerance) break;

    std::vector<double> centroid(d, 0.0);
    for (std::size_t v = 0; v < d; ++v)
      for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[v].x[j] / static_cast<double>(d);
    auto along = [&](double t) {
      std::vector<double> x(d);
      for (std::size_t j = 0; j < d; ++j) x[j] = centroid[j] + t * (simplex[d].x[j] - centroid[j]);
      return evaluate(std::move(x));
    };
    const Vertex reflected = along(-1.0);
    if (reflected.f < simplex[0].f) {
      const Vertex expanded = along(-2.0);
      simplex[d] = expanded.f < reflected.f ? expanded : reflected;
    } else if (reflected.f < simplex[d - 1].f) {
      simplex[d] = reflected;
    } else {
      const Vertex contracted = reflected.f < simplex[d].f ? along(-0.5) : along(0.5);
      if (contracted.f < std::min(reflected.f, simplex[d].f)) {
        simplex[d] = contracted;
      } else {
        for (std::size_t v = 1; v <= d; ++v) {
          std::vector<double> x(d);
          for (std::size_t j = 0; j < d; ++j) x[j] = simplex[0].x[j] + 0.5 * (simplex[v].x[j] - simplex[0].x[j]);
          simplex[v] = evaluate(std::move(x));
        }
      }
    }
    order();
  }
  return simplex[0];
}

}  // namespace

double contrast(std::span<const double> sample, const ParamPoint& theta, const ParamPoint& theta0,
                const ParamSpace& space) {
  if (theta == theta0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double a = space.log_density(theta, sample[i]);
    const double b = space.log_density(theta0, sample[i]);
    if (!(a > -std::numeric_limits<double>::infinity()) || !(b > -std::numeric_limits<double>::infinity()))
      throw DensityZeroError("density vanishes at observation " + std::to_string(i) + " (x = " +
                                 std::to_string(sample[i]) + ")",
                             i);
    acc += a - b;
  }
  return acc;
}

ProfileResult profile_mle_continuous(std::span<const double> sample, int m, const ParamSpace& space,
                                     const ParamPoint& theta0, const OptimizerOptions& options) {
  if (m < 0 || m > space.n_max()) throw DomainError("profile: level " + std::to_string(m) + " is outside 0..N");
  const auto& box = space.box();
  ProfileResult out;
  if (box.empty()) {
    out.value = contrast(sample, ParamPoint{m, {}}, theta0, space);
    return out;
  }
  const double base = log_likelihood(sample, theta0, space);
  auto value = [&](const std::vector<double>& beta) {
    const ParamPoint p{m, beta};
    return p == theta0 ? 0.0 : log_likelihood(sample, p, space) - base;
  };

  const auto grid = space.grid(m, m, options.gridPointsPerCoordinate);
  std::vector<double> values(grid.size());
  std::size_t best = 0;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    values[k] = value(grid[k].beta);
    lowest = std::min(lowest, values[k]);
    if (strictly_greater(values[k], values[best])) best = k;
  }
  out.betaHat = grid[best].beta;
  out.value = values[best];
  if (!strictly_greater(values[best], lowest)) {
    out.tieFlag = true;
    return out;
  }

  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  const std::size_t starts = std::min<std::size_t>(static_cast<std::size_t>(options.starts), order.size());
  const double step = 1.0 / std::max(2, options.gridPointsPerCoordinate - 1);
  bool allBoundary = true;
  for (std::size_t s = 0; s < starts; ++s) {
    const auto v = nelder_mead([&](const std::vector<double>& b) { return -value(b); }, grid[order[s]].beta, box,
                               options, step);
    allBoundary = allBoundary && on_boundary(v.x, box);
    if (strictly_greater(-v.f, out.value)) {
      out.value = -v.f;
      out.betaHat = v.x;
    }
  }
  out.boundaryFlag = allBoundary;
  return out;
}

MleResult mle(std::span<const double> sample, const ParamSpace& space, const ParamPoint& theta0,
              const OptimizerOptions& options) {
  if (sample.empty()) throw DomainError("mle: empty sample");
  space.check(theta0);
  MleResult r;
  for (int m = 0; m <= space.n_max(); ++m) r.profile.push_back(profile_mle_continuous(sample, m, space, theta0, options));

  int bestAlt = -1;
  for (int m = 1; m <= space.n_max(); ++m)
    if (bestAlt < 0 || strictly_greater(r.profile[m].value, r.profile[bestAlt].value)) bestAlt = m;
  bool altTie = false;
  for (int m = 1; m <= space.n_max(); ++m)
    if (m != bestAlt && !strictly_greater(r.profile[bestAlt].value, r.profile[m].value)) altTie = true;

  const double v0 = r.profile[0].value;
  if (bestAlt >= 1 && strictly_greater(r.profile[bestAlt].value, v0)) {
    r.tauHat = bestAlt;
    r.tieFlag = altTie;
  } else {
    r.tauHat = 0;
    r.tieFlag = bestAlt >= 1 && !strictly_greater(v0, r.profile[bestAlt].value);
  }
  const auto& chosen = r.profile[static_cast<std::size_t>(r.tauHat)];
  r.betaHat = chosen.betaHat;
  r.logLik = chosen.value;
  r.tieFlag = r.tieFlag || chosen.tieFlag;
  r.boundaryFlag = chosen.boundaryFlag;
  return r;
}

double stationarity_residual(std::span<const double> sample, const ParamPoint& thetaHat, const ParamSpace& space,
                             const ParamPoint& theta0) {
  const auto& box = space.box();
  space.check(thetaHat);
  double worst = 0.0;
  for (std::size_t j = 0; j < box.size(); ++j) {
    const double h = 1e-5 * box[j].width();
    if (thetaHat.beta[j] - h < box[j].lower || thetaHat.beta[j] + h > box[j].upper)
      throw DomainError("stationarity_residual: beta coordinate " + std::to_string(j) +
                        " lies on the boundary of the box");
    auto up = thetaHat, down = thetaHat;
    up.beta[j] += h;
    down.beta[j] -= h;
    const double g = (contrast(sample, up, theta0, space) - contrast(sample, down, theta0, space)) / (2.0 * h);
    worst = std::max(worst, std::abs(g));
  }
  return worst;
}

double expected_contrast_a(const ParamPoint& theta, const ParamPoint& theta0, const ParamSpace& space) {
  if (theta == theta0) return 0.0;
  const auto r = kl_divergence(space.model(theta0), space.model(theta));
  return -r.value;
}

std::string to_csv_row(const MleResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.tauHat;
  for (double b : r.betaHat) os << ',' << b;
  os << ',' << r.logLik << ',' << (r.tieFlag ? 1 : 0);
  return os.str();
}

PreparedClassifier::PreparedClassifier(const ParamSpace& space, const ParamPoint& theta0) {
  if (space.beta_dim() != 0) throw DomainError("prepared classifier needs a space without a beta box");
  space.check(theta0);
  models_.reserve(static_cast<std::size_t>(space.n_max()) + 1);
  models_.push_back(space.model(theta0));
  for (int m = 1; m <= space.n_max(); ++m) models_.push_back(space.model(ParamPoint{m, {}}));
  ratios_.reserve(models_.size());
  for (std::size_t m = 1; m < models_.size(); ++m) ratios_.emplace_back(models_[m], models_[0]);
}

bool PreparedClassifier::misclassified(std::span<const double> sample) const {
  for (const auto& ratio : ratios_) {
    double acc = 0.0;
    for (double x : sample) acc += ratio(x);
    if (std::isnan(acc)) throw DensityZeroError("density vanishes in the sample", 0);
    if (strictly_greater(acc, 0.0)) return true;
  }
  return false;
}

}  // namespace mledr
