#include "mledr/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "mledr/error.hpp"
#include "mledr/quadrature.hpp"

namespace mledr {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kLogSqrt2Pi = 0.91893853320467274;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxConsecutiveRejections = 1'000'000;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double standard_normal(RandomStream& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double gamma_variate(RandomStream& rng, double shape) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(rng);
}

// ---------------------------------------------------------------- quasi-Gaussian

double qg_log_density(const QuasiGaussianParams& p, double x) {
  const double t = x - p.center;
  const double w = omega_weight(t, p.exponents, p.c1, p.c2);
  if (w <= 0.0) return kNegInf;
  return std::log(w) - kLogSqrt2Pi - std::log(p.sigma) - t * t / (2.0 * p.sigma * p.sigma);
}

double qg_density(const QuasiGaussianParams& p, double x) {
  const double t = x - p.center;
  return omega_weight(t, p.exponents, p.c1, p.c2) * std::exp(-t * t / (2.0 * p.sigma * p.sigma)) /
         (kSqrt2Pi * p.sigma);
}

double qg_negative_mass(const QuasiGaussianParams& p) {
  return p.c1 * moment_integral(p.exponents.alphaNeg, p.sigma) / (kSqrt2Pi * p.sigma);
}

double qg_cdf(const QuasiGaussianParams& p, double x) {
  const double t = x - p.center;
  const double z = t * t / (2.0 * p.sigma * p.sigma);
  const double negMass = qg_negative_mass(p);
  if (t < 0.0) {
    if (p.c1 == 0.0) return 0.0;
    return negMass * boost::math::gamma_q((p.exponents.alphaNeg + 1.0) / 2.0, z);
  }
  if (p.c2 == 0.0) return 1.0;
  const double posMass = 1.0 - negMass;
  return negMass + posMass * boost::math::gamma_p((p.exponents.alphaPos + 1.0) / 2.0, z);
}

double qg_sample(const QuasiGaussianParams& p, RandomStream& rng) {
  // t^2 / (2 sigma^2) is Gamma((alpha + 1) / 2) distributed on each side.
  const bool negative = rng.uniform() < qg_negative_mass(p);
  const double alpha = negative ? p.exponents.alphaNeg : p.exponents.alphaPos;
  const double t = p.sigma * std::sqrt(2.0 * gamma_variate(rng, (alpha + 1.0) / 2.0));
  return negative ? p.center - t : p.center + t;
}

// ---------------------------------------------------------------- mixtures

double mixture_log_density(const MixtureModel& m, std::span<const double> x) {
  double best = kNegInf;
  std::vector<double> terms(m.weights.size());
  for (std::size_t k = 0; k < m.weights.size(); ++k) {
    double s = std::log(m.weights[k]);
    for (std::size_t j = 0; j < m.dim; ++j) s += qg_log_density(m.components[k][j], x[j]);
    terms[k] = s;
    best = std::max(best, s);
  }
  if (best == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - best);
  return best + std::log(acc);
}

// ---------------------------------------------------------------- stretched exponential

double stretched_log_norm(const family::StretchedExp& s) {
  return std::log(2.0 * s.scale) + std::lgamma(1.0 + 1.0 / s.r);
}

// ---------------------------------------------------------------- power tail

double power_tail_kernel(double p, double x) {
  const double a = std::abs(x);
  const double l = std::log(std::numbers::e + a);
  return 1.0 / ((1.0 + std::pow(a, p + 1.0)) * l * l);
}

struct PowerTailCache {
  double c0;
  std::shared_ptr<const InverseCdfTable> sampler;
};

PowerTailCache power_tail_cache(double p) {
  static std::mutex mu;
  static std::map<double, PowerTailCache> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(p); it != cache.end()) return it->second;
  QuadratureOptions o;
  o.absTol = 1e-14;
  o.relTol = 1e-13;
  const auto half = integrate_heavy_tail([p](double x) { return power_tail_kernel(p, x); }, 0.0, o);
  if (!half.converged) throw NumericalError("power-tail normalizer did not converge", half.errorEstimate);
  const double c0 = 1.0 / (2.0 * half.value);
  auto table = std::make_shared<const InverseCdfTable>(
      [p, c0](double x) { return c0 * power_tail_kernel(p, x); });
  PowerTailCache entry{c0, std::move(table)};
  cache.emplace(p, entry);
  return entry;
}

// ---------------------------------------------------------------- stable

double stable_density(const family::Stable& s, double x) {
  if (s.alpha == 1.0) return 1.0 / (kPi * (1.0 + x * x));
  if (s.alpha == 2.0) return std::exp(-x * x / 4.0) / (2.0 * std::sqrt(kPi));
  if (!s.table) throw DomainError("stable density is available for alpha in [1, 2] only");
  return s.table->density(x);
}

double stable_sample(double alpha, RandomStream& rng) {
  // Chambers-Mallows-Stuck transform for the symmetric case.
  const double v = kPi * (rng.uniform() - 0.5);
  if (alpha == 1.0) return std::tan(v);
  const double w = -std::log(rng.uniform());
  const double cv = std::cos(v);
  return std::sin(alpha * v) / std::pow(cv, 1.0 / alpha) *
         std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
}

double numeric_cdf(const DensityModel& m, double x) {
  QuadratureOptions o;
  o.absTol = 1e-12;
  const auto bps = m.breakpoints();
  // integrate from the nearest breakpoint to keep the integration range short
  double anchorValue = 0.5;
  double anchor = 0.0;
  bool symmetric = true;
  if (const auto* t = std::get_if<family::Tilted>(&m.family())) {
    (void)t;
    symmetric = false;
  }
  if (symmetric) {
    const auto r = integrate([&](double u) { return m.density(u); }, anchor, x, o);
    return std::clamp(anchorValue + r.value, 0.0, 1.0);
  }
  std::vector<double> pts;
  for (double b : bps)
    if (b < x) pts.push_back(b);
  pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  double total = integrate([&](double u) { return m.density(u); },
                           -std::numeric_limits<double>::infinity(), pts.front(), o)
                     .value;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += integrate([&](double u) { return m.density(u); }, pts[i], pts[i + 1], o).value;
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace

// ---------------------------------------------------------------- free functions

void WeightExponents::validate() const {
  if (!(alphaNeg > -1.0) || !(alphaPos > -1.0))
    throw DomainError("weight exponents must exceed -1 (got " + std::to_string(alphaNeg) + ", " +
                      std::to_string(alphaPos) + ")");
}

void QuasiGaussianParams::validate() const {
  exponents.validate();
  if (!(sigma > 0.0)) throw DomainError("quasi-Gaussian sigma must be positive");
  if (!(c1 >= 0.0) || !(c2 >= 0.0) || !(c1 + c2 > 0.0))
    throw DomainError("quasi-Gaussian constants must be nonnegative and not both zero");
  const double lhs = c1 * moment_integral(exponents.alphaNeg, sigma) +
                     c2 * moment_integral(exponents.alphaPos, sigma);
  const double rhs = sigma * kSqrt2Pi;
  if (std::abs(lhs - rhs) > 1e-10 * rhs)
    throw DomainError("quasi-Gaussian constants violate c1 I(a1) + c2 I(a2) = sigma sqrt(2 pi)");
}

void MixtureModel::validate() const {
  if (dim == 0) throw DomainError("mixture dimension must be positive");
  if (weights.empty() || weights.size() != components.size())
    throw DomainError("mixture needs one weight per component");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("mixture weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DomainError("mixture weights must sum to 1");
  for (const auto& comp : components) {
    if (comp.size() != dim) throw DomainError("every mixture component needs exactly dim coordinate laws");
    for (const auto& law : comp) law.validate();
  }
}

double omega_weight(double x, const WeightExponents& e, double c1, double c2) {
  if (x < 0.0) return c1 * std::pow(-x, e.alphaNeg);
  if (x > 0.0) return c2 * std::pow(x, e.alphaPos);
  return 0.0;
}

double moment_integral(double alpha, double sigma) {
  if (!(alpha > -1.0)) throw DomainError("moment_integral: alpha must exceed -1, the integral diverges");
  if (!(sigma > 0.0)) throw DomainError("moment_integral: sigma must be positive");
  return std::pow(2.0, (alpha - 1.0) / 2.0) * std::pow(sigma, alpha + 1.0) *
         std::tgamma((alpha + 1.0) / 2.0);
}

NormalizingConstants qg_normalize(const WeightExponents& exponents, double sigma, FixedSide side,
                                  double fixedValue) {
  exponents.validate();
  if (!(fixedValue >= 0.0)) throw DomainError("qg_normalize: fixed constant must be nonnegative");
  const double budget = sigma * kSqrt2Pi;
  const double iNeg = moment_integral(exponents.alphaNeg, sigma);
  const double iPos = moment_integral(exponents.alphaPos, sigma);
  const double used = side == FixedSide::C1 ? fixedValue * iNeg : fixedValue * iPos;
  const double remaining = budget - used;
  // tolerate rounding at the exact threshold
  if (remaining < -1e-12 * budget) {
    const double threshold = side == FixedSide::C1 ? budget / iNeg : budget / iPos;
    throw InfeasibleError("qg_normalize: fixed constant " + std::to_string(fixedValue) +
                          " exceeds the feasibility threshold " + std::to_string(threshold));
  }
  const double partner = std::max(0.0, remaining) / (side == FixedSide::C1 ? iPos : iNeg);
  return side == FixedSide::C1 ? NormalizingConstants{fixedValue, partner}
                               : NormalizingConstants{partner, fixedValue};
}

PolarCoordinates polar_decompose(double x, double y) {
  if (x == 0.0 && y == 0.0) throw DomainError("polar_decompose: the origin has no angle");
  double angle = std::atan2(y, x);
  if (angle < 0.0) angle += 2.0 * kPi;
  if (angle >= 2.0 * kPi) angle = 0.0;
  return {std::hypot(x, y), angle};
}

// ---------------------------------------------------------------- factories

DensityModel DensityModel::gaussian(double mean, double sd) {
  if (!(sd > 0.0)) throw DomainError("gaussian: sd must be positive");
  return DensityModel(family::Gaussian{mean, sd});
}

DensityModel DensityModel::quasi_gaussian(const QuasiGaussianParams& params) {
  params.validate();
  return DensityModel(family::QuasiGaussian{params});
}

DensityModel DensityModel::mixture(MixtureModel model) {
  model.validate();
  return DensityModel(family::Mixture{std::move(model)});
}

DensityModel DensityModel::stretched_exp(double r, double scale) {
  if (!(r > 0.0) || !(scale > 0.0)) throw DomainError("stretched_exp: r and scale must be positive");
  return DensityModel(family::StretchedExp{r, scale});
}

DensityModel DensityModel::power_tail(double p) {
  if (!(p > 0.0)) throw DomainError("power_tail: p must be positive");
  const auto cache = power_tail_cache(p);
  return DensityModel(family::PowerTail{p, cache.c0, cache.sampler});
}

DensityModel DensityModel::stable(double alpha) {
  if (!(alpha > 0.0) || alpha > 2.0) throw DomainError("stable: alpha must lie in (0, 2]");
  family::Stable s{alpha, nullptr};
  if (alpha >= 1.0 && alpha != 1.0 && alpha != 2.0) s.table = StableDensityTable::get(alpha);
  return DensityModel(s);
}

DensityModel DensityModel::cauchy() { return DensityModel(family::Cauchy{}); }

DensityModel DensityModel::tilted(const DensityModel& base) { return tilted(base, tilt_constant(base)); }

DensityModel DensityModel::tilted(const DensityModel& base, double tiltConstant) {
  if (base.dim() != 1) throw DomainError("tilted: base must be one-dimensional");
  if (!(tiltConstant > 0.0)) throw DomainError("tilted: tilt constant must be positive");
  return DensityModel(family::Tilted{std::make_shared<const DensityModel>(base), tiltConstant});
}

// ---------------------------------------------------------------- evaluation

std::string_view DensityModel::family_name() const {
  return std::visit(overloaded{
                        [](const family::Gaussian&) { return std::string_view("gaussian"); },
                        [](const family::QuasiGaussian&) { return std::string_view("quasi_gaussian"); },
                        [](const family::Mixture&) { return std::string_view("mixture"); },
                        [](const family::StretchedExp&) { return std::string_view("stretched_exp"); },
                        [](const family::PowerTail&) { return std::string_view("power_tail"); },
                        [](const family::Stable&) { return std::string_view("stable"); },
                        [](const family::Cauchy&) { return std::string_view("cauchy"); },
                        [](const family::Tilted&) { return std::string_view("tilted"); },
                    },
                    family_);
}

std::size_t DensityModel::dim() const {
  if (const auto* m = std::get_if<family::Mixture>(&family_)) return m->model.dim;
  return 1;
}

double DensityModel::log_density(double x) const {
  return std::visit(
      overloaded{
          [x](const family::Gaussian& g) {
            const double z = (x - g.mean) / g.sd;
            return -0.5 * z * z - kLogSqrt2Pi - std::log(g.sd);
          },
          [x](const family::QuasiGaussian& q) { return qg_log_density(q.params, x); },
          [x](const family::Mixture& m) {
            if (m.model.dim != 1) throw DomainError("scalar evaluation of a multivariate mixture");
            const double v[] = {x};
            return mixture_log_density(m.model, v);
          },
          [x](const family::StretchedExp& s) {
            return -std::pow(std::abs(x) / s.scale, s.r) - stretched_log_norm(s);
          },
          [x](const family::PowerTail& p) {
            const double a = std::abs(x);
            return std::log(p.c0) - std::log1p(std::pow(a, p.p + 1.0)) -
                   2.0 * std::log(std::log(std::numbers::e + a));
          },
          [x](const family::Stable& s) {
            if (s.alpha == 1.0) return -std::log(kPi) - std::log1p(x * x);
            if (s.alpha == 2.0) return -x * x / 4.0 - std::log(2.0 * std::sqrt(kPi));
            if (!s.table) throw DomainError("stable density is available for alpha in [1, 2] only");
            return s.table->log_density(x);
          },
          [x](const family::Cauchy&) { return -std::log(kPi) - std::log1p(x * x); },
          [x](const family::Tilted& t) {
            return std::log(t.tiltConstant) - std::abs(x) + t.base->log_density(x);
          },
      },
      family_);
}

double DensityModel::density(double x) const {
  return std::visit(
      overloaded{
          [x](const family::Gaussian& g) {
            const double z = (x - g.mean) / g.sd;
            return std::exp(-0.5 * z * z) / (kSqrt2Pi * g.sd);
          },
          [x](const family::QuasiGaussian& q) { return qg_density(q.params, x); },
          [this, x](const family::Mixture&) { return std::exp(log_density(x)); },
          [x](const family::StretchedExp& s) {
            return std::exp(-std::pow(std::abs(x) / s.scale, s.r) - stretched_log_norm(s));
          },
          [x](const family::PowerTail& p) { return p.c0 * power_tail_kernel(p.p, x); },
          [x](const family::Stable& s) { return stable_density(s, x); },
          [x](const family::Cauchy&) { return 1.0 / (kPi * (1.0 + x * x)); },
          [x](const family::Tilted& t) { return t.tiltConstant * std::exp(-std::abs(x)) * t.base->density(x); },
      },
      family_);
}

double DensityModel::log_density(std::span<const double> x) const {
  if (const auto* m = std::get_if<family::Mixture>(&family_)) {
    if (x.size() != m->model.dim) throw DomainError("mixture: point dimension mismatch");
    return mixture_log_density(m->model, x);
  }
  if (x.size() != 1) throw DomainError("scalar model evaluated at a vector");
  return log_density(x[0]);
}

double DensityModel::density(std::span<const double> x) const { return std::exp(log_density(x)); }

double DensityModel::cdf(double x) const {
  return std::visit(
      overloaded{
          [x](const family::Gaussian& g) { return 0.5 * std::erfc(-(x - g.mean) / (g.sd * std::numbers::sqrt2)); },
          [x](const family::QuasiGaussian& q) { return qg_cdf(q.params, x); },
          [x](const family::Mixture& m) {
            if (m.model.dim != 1) throw DomainError("cdf of a multivariate mixture");
            double acc = 0.0;
            for (std::size_t k = 0; k < m.model.weights.size(); ++k)
              acc += m.model.weights[k] * qg_cdf(m.model.components[k][0], x);
            return acc;
          },
          [x](const family::StretchedExp& s) {
            const double tail = 0.5 * boost::math::gamma_q(1.0 / s.r, std::pow(std::abs(x) / s.scale, s.r));
            return x < 0.0 ? tail : 1.0 - tail;
          },
          [x](const family::PowerTail& p) {
            const double tail = 0.5 * p.sampler->abs_survival(std::abs(x));
            return x < 0.0 ? tail : 1.0 - tail;
          },
          [this, x](const family::Stable& s) {
            if (s.alpha == 1.0) return 0.5 + std::atan(x) / kPi;
            if (s.alpha == 2.0) return 0.5 * std::erfc(-x / 2.0);
            return numeric_cdf(*this, x);
          },
          [x](const family::Cauchy&) { return 0.5 + std::atan(x) / kPi; },
          [this, x](const family::Tilted&) { return numeric_cdf(*this, x); },
      },
      family_);
}

std::vector<double> DensityModel::breakpoints() const {
  return std::visit(
      overloaded{
          [](const family::Gaussian& g) {
            return std::vector<double>{g.mean - 5 * g.sd, g.mean - g.sd, g.mean, g.mean + g.sd, g.mean + 5 * g.sd};
          },
          [](const family::QuasiGaussian& q) {
            const double a = q.params.center, s = q.params.sigma;
            return std::vector<double>{a - 5 * s, a - s, a, a + s, a + 5 * s};
          },
          [](const family::Mixture& m) {
            std::vector<double> out;
            if (m.model.dim == 1)
              for (const auto& c : m.model.components) {
                out.push_back(c[0].center);
                out.push_back(c[0].center - 5 * c[0].sigma);
                out.push_back(c[0].center + 5 * c[0].sigma);
              }
            return out;
          },
          [](const family::StretchedExp& s) { return std::vector<double>{-s.scale, 0.0, s.scale}; },
          [](const family::PowerTail&) { return std::vector<double>{-1.0, 0.0, 1.0}; },
          [](const family::Stable&) { return std::vector<double>{-1.0, 0.0, 1.0}; },
          [](const family::Cauchy&) { return std::vector<double>{-1.0, 0.0, 1.0}; },
          [](const family::Tilted& t) {
            auto out = t.base->breakpoints();
            out.push_back(0.0);
            return out;
          },
      },
      family_);
}

// ---------------------------------------------------------------- sampling

double DensityModel::sample(RandomStream& rng) const {
  return std::visit(
      overloaded{
          [&rng](const family::Gaussian& g) { return g.mean + g.sd * standard_normal(rng); },
          [&rng](const family::QuasiGaussian& q) { return qg_sample(q.params, rng); },
          [this, &rng](const family::Mixture& m) {
            if (m.model.dim != 1) throw DomainError("scalar sample of a multivariate mixture");
            return sample_vectors(rng, 1)[0];
          },
          [&rng](const family::StretchedExp& s) {
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            return sign * s.scale * std::pow(gamma_variate(rng, 1.0 / s.r), 1.0 / s.r);
          },
          [&rng](const family::PowerTail& p) {
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            return sign * p.sampler->sample_abs(rng.uniform());
          },
          [&rng](const family::Stable& s) { return stable_sample(s.alpha, rng); },
          [&rng](const family::Cauchy&) { return std::tan(kPi * (rng.uniform() - 0.5)); },
          [&rng](const family::Tilted& t) {
            // acceptance probability exp(-|x|) / max, the maximum being 1 at x = 0
            for (int attempt = 0; attempt < kMaxConsecutiveRejections; ++attempt) {
              const double x = t.base->sample(rng);
              if (rng.uniform() <= std::exp(-std::abs(x))) return x;
            }
            throw NumericalError("tilted sampler: " + std::to_string(kMaxConsecutiveRejections) +
                                 " consecutive rejections (tilt constant " +
                                 std::to_string(t.tiltConstant) + ")");
          },
      },
      family_);
}

void DensityModel::sample_into(RandomStream& rng, std::span<double> out) const {
  if (const auto* g = std::get_if<family::Gaussian>(&family_)) {
    std::size_t i = 0;
    for (; i + 1 < out.size(); i += 2) {
      const double r = std::sqrt(-2.0 * std::log(rng.uniform()));
      const double a = 2.0 * kPi * rng.uniform();
      out[i] = g->mean + g->sd * r * std::cos(a);
      out[i + 1] = g->mean + g->sd * r * std::sin(a);
    }
    if (i < out.size()) out[i] = g->mean + g->sd * standard_normal(rng);
    return;
  }
  for (double& v : out) v = sample(rng);
}

std::vector<double> DensityModel::sample(RandomStream& rng, std::size_t count) const {
  if (count == 0) throw DomainError("sample: count must be at least 1");
  std::vector<double> out(count);
  sample_into(rng, out);
  return out;
}

std::vector<double> DensityModel::sample_vectors(RandomStream& rng, std::size_t count) const {
  if (count == 0) throw DomainError("sample: count must be at least 1");
  const auto* m = std::get_if<family::Mixture>(&family_);
  if (!m) return sample(rng, count);
  const auto& model = m->model;
  std::vector<double> out(count * model.dim);
  for (std::size_t i = 0; i < count; ++i) {
    double u = rng.uniform();
    std::size_t k = 0;
    while (k + 1 < model.weights.size() && u > model.weights[k]) {
      u -= model.weights[k];
      ++k;
    }
    for (std::size_t j = 0; j < model.dim; ++j) out[i * model.dim + j] = qg_sample(model.components[k][j], rng);
  }
  return out;
}

bool DensityModel::operator==(const DensityModel& other) const {
  if (family_.index() != other.family_.index()) return false;
  return std::visit(
      overloaded{
          [&](const family::Gaussian& a) {
            const auto& b = std::get<family::Gaussian>(other.family_);
            return a.mean == b.mean && a.sd == b.sd;
          },
          [&](const family::QuasiGaussian& a) { return a.params == std::get<family::QuasiGaussian>(other.family_).params; },
          [&](const family::Mixture& a) { return a.model == std::get<family::Mixture>(other.family_).model; },
          [&](const family::StretchedExp& a) {
            const auto& b = std::get<family::StretchedExp>(other.family_);
            return a.r == b.r && a.scale == b.scale;
          },
          [&](const family::PowerTail& a) { return a.p == std::get<family::PowerTail>(other.family_).p; },
          [&](const family::Stable& a) { return a.alpha == std::get<family::Stable>(other.family_).alpha; },
          [](const family::Cauchy&) { return true; },
          [&](const family::Tilted& a) {
            const auto& b = std::get<family::Tilted>(other.family_);
            return a.tiltConstant == b.tiltConstant && *a.base == *b.base;
          },
      },
      family_);
}

// ---------------------------------------------------------------- tilts and ratios

double tilt_constant(const DensityModel& base) {
  if (base.dim() != 1) throw DomainError("tilt_constant: base must be one-dimensional");
  auto bps = base.breakpoints();
  bps.push_back(0.0);
  QuadratureOptions o;
  o.absTol = 1e-13;
  o.relTol = 1e-10;
  const auto r = integrate_real_line([&](double x) { return std::exp(-std::abs(x)) * base.density(x); }, bps, o);
  if (!r.converged || !(r.value > 0.0))
    throw NumericalError("tilt_constant: quadrature did not converge (error estimate " +
                             std::to_string(r.errorEstimate) + ")",
                         r.errorEstimate);
  return 1.0 / r.value;
}

double log_density_ratio(const DensityModel& num, const DensityModel& den, double x) {
  return LogRatio(num, den)(x);
}

LogRatio::LogRatio(const DensityModel& num, const DensityModel& den) : kind_(Kind::General), num_(&num), den_(&den) {
  if (num == den) {
    kind_ = Kind::Identical;
    return;
  }
  if (const auto* t = std::get_if<family::Tilted>(&num.family()); t && *t->base == den) {
    kind_ = Kind::TiltOverBase;
    logTilt_ = std::log(t->tiltConstant);
    return;
  }
  if (const auto* t = std::get_if<family::Tilted>(&den.family()); t && *t->base == num) {
    kind_ = Kind::BaseOverTilt;
    logTilt_ = std::log(t->tiltConstant);
  }
}

double LogRatio::operator()(double x) const {
  switch (kind_) {
    case Kind::Identical:
      return 0.0;
    case Kind::TiltOverBase:
      return logTilt_ - std::abs(x);
    case Kind::BaseOverTilt:
      return std::abs(x) - logTilt_;
    case Kind::General:
      break;
  }
  return num_->log_density(x) - den_->log_density(x);
}

// ---------------------------------------------------------------- inverse-CDF table

InverseCdfTable::InverseCdfTable(const std::function<double(double)>& halfDensity, double xMax) {
  const double yMax = std::log1p(xMax);
  std::vector<double> y(kKnots);
  for (int k = 0; k < kKnots; ++k) y[k] = yMax * k / (kKnots - 1);
  QuadratureOptions o;
  o.absTol = 1e-16;
  o.relTol = 1e-12;
  std::vector<double> survival(kKnots, 0.0);
  survival[kKnots - 1] = integrate_heavy_tail(halfDensity, std::expm1(yMax), o).value;
  for (int k = kKnots - 2; k >= 0; --k)
    survival[k] = survival[k + 1] + integrate(halfDensity, std::expm1(y[k]), std::expm1(y[k + 1]), o).value;
  const double total = survival[0];
  std::vector<double> logS(kKnots), negLogS(kKnots);
  for (int k = 0; k < kKnots; ++k) {
    logS[k] = std::log(survival[k] / total);
    negLogS[k] = -logS[k];
  }
  negLogS[0] = 0.0;
  lastX_ = xMax;
  lastLogS_ = logS.back();
  const double x0 = std::expm1(y[kKnots - 2]);
  tailIndex_ = (logS[kKnots - 2] - logS[kKnots - 1]) / std::log(xMax / x0);
  logSurvivalOfY_ = TabulatedFunction(y, std::move(logS));
  yOfNegLogSurvival_ = TabulatedFunction(std::move(negLogS), std::move(y));
}

double InverseCdfTable::sample_abs(double u) const {
  const double z = -std::log(u);
  if (z <= -lastLogS_) return std::expm1(yOfNegLogSurvival_(z));
  return lastX_ * std::exp((z + lastLogS_) / tailIndex_);
}

double InverseCdfTable::abs_survival(double x) const {
  const double y = std::log1p(std::abs(x));
  if (x <= lastX_) return std::exp(logSurvivalOfY_(y));
  return std::exp(lastLogS_ - tailIndex_ * std::log(x / lastX_));
}

}  // namespace mledr
