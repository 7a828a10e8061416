#include "mledr/param_space.hpp"

#include <climits>
#include <cmath>
#include <sstream>

#include "mledr/error.hpp"

namespace mledr {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274;

double gaussian_log_density(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - kLogSqrt2Pi - std::log(sd);
}

DensityModel shifted(const DensityModel& model, double shift) {
  if (const auto* g = std::get_if<family::Gaussian>(&model.family()))
    return DensityModel::gaussian(g->mean + shift, g->sd);
  if (const auto* q = std::get_if<family::QuasiGaussian>(&model.family())) {
    auto p = q->params;
    p.center += shift;
    return DensityModel::quasi_gaussian(p);
  }
  if (shift == 0.0) return model;
  throw DomainError("location binder: cannot shift a " + std::string(model.family_name()) + " model");
}

}  // namespace

std::string to_string(const ParamPoint& point) {
  std::ostringstream os;
  os << "(" << point.m;
  for (double b : point.beta) os << ", " << b;
  os << ")";
  return os.str();
}

FamilyBinder::FamilyBinder(Kind kind, std::vector<DensityModel> levels, double step, double sigma)
    : kind_(kind), levels_(std::move(levels)), step_(step), sigma_(sigma) {}

FamilyBinder FamilyBinder::fixed(std::vector<DensityModel> levels) {
  if (levels.empty()) throw DomainError("fixed binder needs at least one level");
  return FamilyBinder(Kind::Fixed, std::move(levels), 1.0, 1.0);
}

FamilyBinder FamilyBinder::location(std::vector<DensityModel> levels) {
  if (levels.empty()) throw DomainError("location binder needs at least one level");
  for (const auto& l : levels)
    if (l.dim() != 1) throw DomainError("location binder needs one-dimensional levels");
  return FamilyBinder(Kind::Location, std::move(levels), 1.0, 1.0);
}

FamilyBinder FamilyBinder::gaussian_mean(double step, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("gaussian_mean binder: sigma must be positive");
  return FamilyBinder(Kind::GaussianMean, {}, step, sigma);
}

FamilyBinder FamilyBinder::gaussian_sd(double step, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("gaussian_sd binder: sigma must be positive");
  return FamilyBinder(Kind::GaussianSd, {}, step, sigma);
}

int FamilyBinder::max_level() const {
  if (kind_ == Kind::Fixed || kind_ == Kind::Location) return static_cast<int>(levels_.size()) - 1;
  return INT_MAX;
}

DensityModel FamilyBinder::model(const ParamPoint& p) const {
  switch (kind_) {
    case Kind::Fixed:
      return levels_.at(static_cast<std::size_t>(p.m));
    case Kind::Location:
      return shifted(levels_.at(static_cast<std::size_t>(p.m)), p.beta.empty() ? 0.0 : p.beta[0]);
    case Kind::GaussianMean:
      return DensityModel::gaussian(p.m * (p.beta.empty() ? step_ : p.beta[0]), sigma_);
    case Kind::GaussianSd:
      return DensityModel::gaussian(p.m * step_, p.beta.empty() ? sigma_ : p.beta[0]);
  }
  throw DomainError("unknown binder kind");
}

double FamilyBinder::log_density(const ParamPoint& p, double x) const {
  switch (kind_) {
    case Kind::Fixed:
      return levels_[static_cast<std::size_t>(p.m)].log_density(x);
    case Kind::Location:
      return levels_[static_cast<std::size_t>(p.m)].log_density(x - (p.beta.empty() ? 0.0 : p.beta[0]));
    case Kind::GaussianMean:
      return gaussian_log_density(x, p.m * (p.beta.empty() ? step_ : p.beta[0]), sigma_);
    case Kind::GaussianSd:
      return gaussian_log_density(x, p.m * step_, p.beta.empty() ? sigma_ : p.beta[0]);
  }
  return 0.0;
}

ParamSpace::ParamSpace(int nMax, std::vector<Interval> box, FamilyBinder binder)
    : nMax_(nMax), box_(std::move(box)), binder_(std::move(binder)) {
  if (nMax_ < 0) throw DomainError("param space: nMax must be >= 0");
  if (nMax_ > binder_.max_level())
    throw DomainError("param space: nMax " + std::to_string(nMax_) + " exceeds the binder's " +
                      std::to_string(binder_.max_level()) + " levels");
  for (std::size_t j = 0; j < box_.size(); ++j)
    if (!(box_[j].lower < box_[j].upper))
      throw DomainError("param space: box coordinate " + std::to_string(j) + " needs lower < upper");
}

bool ParamSpace::contains(const ParamPoint& p) const {
  if (p.m < 0 || p.m > nMax_) return false;
  if (p.beta.size() != box_.size()) return false;
  for (std::size_t j = 0; j < box_.size(); ++j)
    if (p.beta[j] < box_[j].lower || p.beta[j] > box_[j].upper) return false;
  return true;
}

void ParamSpace::check(const ParamPoint& p) const {
  if (!contains(p)) throw DomainError("point " + to_string(p) + " lies outside the parameter space");
}

DensityModel ParamSpace::model(const ParamPoint& p) const { return binder_.model(p); }

double ParamSpace::log_density(const ParamPoint& p, double x) const {
  const double v = binder_.log_density(p, x);
  return reference_ ? v + reference_(x) : v;
}

std::vector<ParamPoint> ParamSpace::grid(int mLo, int mHi, int pointsPerCoordinate) const {
  std::vector<ParamPoint> out;
  const std::size_t d = box_.size();
  std::size_t cells = 1;
  for (std::size_t j = 0; j < d; ++j) cells *= static_cast<std::size_t>(pointsPerCoordinate);
  for (int m = mLo; m <= mHi; ++m) {
    for (std::size_t c = 0; c < cells; ++c) {
      ParamPoint p{m, std::vector<double>(d)};
      std::size_t rest = c;
      for (std::size_t j = 0; j < d; ++j) {
        const auto k = rest % static_cast<std::size_t>(pointsPerCoordinate);
        rest /= static_cast<std::size_t>(pointsPerCoordinate);
        p.beta[j] = pointsPerCoordinate == 1
                        ? 0.5 * (box_[j].lower + box_[j].upper)
                        : box_[j].lower + box_[j].width() * static_cast<double>(k) / (pointsPerCoordinate - 1);
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

bool identifiable(const ParamSpace& space, int pointsPerCoordinate) {
  const auto points = space.grid(0, space.n_max(), space.beta_dim() == 0 ? 1 : pointsPerCoordinate);
  std::vector<double> probes;
  for (int i = 0; i < 64; ++i) probes.push_back(-8.0 + 16.0 * i / 63.0);
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      bool differs = false;
      for (double x : probes) {
        const double la = space.log_density(points[a], x), lb = space.log_density(points[b], x);
        if (std::abs(la - lb) > 1e-10 * std::max(1.0, std::abs(la))) {
          differs = true;
          break;
        }
      }
      if (!differs) return false;
    }
  return true;
}

}  // namespace mledr
