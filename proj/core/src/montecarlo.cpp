#include "mledr/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "mledr/error.hpp"
#include "mledr/rng.hpp"

namespace mledr {
namespace {

constexpr long kChunk = 4096;
constexpr long kMaxFailures = 10;

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(chunkIndex, lo, hi) over [begin, end) in fixed chunks. Results
// must be stored per chunk by the caller so that reduction order is fixed.
template <class Body>
void for_each_chunk(long begin, long end, long chunk, int workers, Body body) {
  const long chunks = (end - begin + chunk - 1) / chunk;
  if (chunks <= 0) return;
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex errorMutex;
  auto run = [&] {
    for (;;) {
      const long c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        const long lo = begin + c * chunk;
        body(c, lo, std::min(end, lo + chunk));
      } catch (...) {
        std::lock_guard lock(errorMutex);
        if (!error) error = std::current_exception();
        next.store(chunks);
      }
    }
  };
  const int count = std::min<long>(resolve_workers(workers), chunks);
  std::vector<std::thread> threads;
  for (int t = 1; t < count; ++t) threads.emplace_back(run);
  run();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

struct CellCounts {
  long hits = 0;
  long failures = 0;
};

// Hits over replications [lo, hi) of the cell with sample size n.
CellCounts count_hits(const ExperimentConfig& c, const DensityModel& truth, const PreparedClassifier* fast, long n,
                      long lo, long hi) {
  CellCounts out;
  std::vector<double> sample(static_cast<std::size_t>(n));
  for (long rep = lo; rep < hi; ++rep) {
    auto rng = replication_stream(c.masterSeed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep));
    try {
      truth.sample_into(rng, sample);
      const bool hit = fast ? fast->misclassified(sample) : mle(sample, *c.space, c.theta0, c.optimizer).tauHat >= 1;
      out.hits += hit ? 1 : 0;
    } catch (const Error&) {
      ++out.failures;
    }
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!space) throw ConfigError("experiment: no parameter space");
  if (!space->contains(theta0)) throw ConfigError("theta0: point " + to_string(theta0) + " is outside the space");
  if (nGrid.empty()) throw ConfigError("experiment.n_grid: must not be empty");
  for (std::size_t i = 0; i < nGrid.size(); ++i) {
    if (nGrid[i] < 1) throw ConfigError("experiment.n_grid: sample sizes must be >= 1");
    if (i > 0 && nGrid[i] <= nGrid[i - 1]) throw ConfigError("experiment.n_grid: must be strictly increasing");
  }
  if (replications < 100) throw ConfigError("experiment.replications: must be >= 100");
  if (!(confidenceLevel > 0.0 && confidenceLevel < 1.0))
    throw ConfigError("experiment.confidence_level: must lie in (0, 1)");
  if (adaptive && maxReplications < replications)
    throw ConfigError("experiment.max_replications: must be >= replications");
  if (workers < 0) throw ConfigError("experiment.workers: must be >= 0");
}

WilsonInterval wilson_interval(long hits, long reps, double level) {
  if (reps <= 0 || hits < 0 || hits > reps) throw DomainError("wilson_interval: need 0 <= hits <= reps, reps > 0");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("wilson_interval: level must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * level);
  const double nn = static_cast<double>(reps), p = static_cast<double>(hits) / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  WilsonInterval w{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (hits == 0) w.low = 0.0;
  if (hits == reps) w.high = 1.0;
  w.low = std::min(w.low, p);
  w.high = std::max(w.high, p);
  return w;
}

std::vector<QnEstimate> estimate_qn(const ExperimentConfig& c) {
  c.validate();
  const auto truth = c.space->model(c.theta0);
  std::unique_ptr<PreparedClassifier> fast;
  if (c.space->beta_dim() == 0) fast = std::make_unique<PreparedClassifier>(*c.space, c.theta0);

  std::vector<QnEstimate> out;
  for (long n : c.nGrid) {
    QnEstimate e;
    e.n = n;
    if (c.space->n_max() == 0) {
      // no alternatives: tauHat is always 0
      e.replications = c.replications;
    } else {
      long done = 0, target = c.replications;
      for (;;) {
        const long chunks = (target - done + kChunk - 1) / kChunk;
        std::vector<CellCounts> parts(static_cast<std::size_t>(chunks));
        for_each_chunk(done, target, kChunk, c.workers, [&](long idx, long lo, long hi) {
          parts[static_cast<std::size_t>(idx)] = count_hits(c, truth, fast.get(), n, lo, hi);
        });
        for (const auto& p : parts) {
          e.hits += p.hits;
          e.failures += p.failures;
        }
        if (e.failures >= kMaxFailures)
          throw NumericalError("estimate_qn: " + std::to_string(e.failures) + " failed replications at n = " +
                               std::to_string(n));
        done = target;
        if (!c.adaptive || e.hits >= c.minHits || done >= c.maxReplications) break;
        target = std::min(c.maxReplications, 2 * done);
      }
      e.replications = done - e.failures;
    }
    e.pHat = static_cast<double>(e.hits) / static_cast<double>(e.replications);
    const auto w = wilson_interval(e.hits, e.replications, c.confidenceLevel);
    e.wilsonLow = w.low;
    e.wilsonHigh = w.high;
    e.measurable = e.hits >= (c.adaptive ? c.minHits : 1) && e.hits < e.replications;
    out.push_back(e);
  }
  return out;
}

std::vector<WnEstimate> estimate_wn(const ExperimentConfig& c, double u) {
  c.validate();
  if (c.space->beta_dim() == 0) throw DomainError("estimate_wn: the space has no continuous parameter");
  if (!(u > 0.0)) throw DomainError("estimate_wn: u must be positive");
  const auto truth = c.space->model(c.theta0);
  std::vector<WnEstimate> out;
  for (long n : c.nGrid) {
    struct Part {
      long w = 0, v1 = 0, v2 = 0, failures = 0;
    };
    const long chunks = (c.replications + kChunk - 1) / kChunk;
    std::vector<Part> parts(static_cast<std::size_t>(chunks));
    for_each_chunk(0, c.replications, kChunk, c.workers, [&](long idx, long lo, long hi) {
      Part p;
      std::vector<double> sample(static_cast<std::size_t>(n));
      for (long rep = lo; rep < hi; ++rep) {
        auto rng = replication_stream(c.masterSeed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep));
        try {
          truth.sample_into(rng, sample);
          const auto r = mle(sample, *c.space, c.theta0, c.optimizer);
          double dist = 0.0;
          for (std::size_t j = 0; j < r.betaHat.size(); ++j) {
            const double diff = r.betaHat[j] - c.theta0.beta[j];
            dist += diff * diff;
          }
          if (std::sqrt(static_cast<double>(n)) * std::sqrt(dist) > u) {
            ++p.w;
            ++(r.tauHat == 0 ? p.v1 : p.v2);
          }
        } catch (const Error&) {
          ++p.failures;
        }
      }
      parts[static_cast<std::size_t>(idx)] = p;
    });
    WnEstimate e;
    e.n = n;
    long failures = 0;
    for (const auto& p : parts) {
      e.wHits += p.w;
      e.v1Hits += p.v1;
      e.v2Hits += p.v2;
      failures += p.failures;
    }
    if (failures >= kMaxFailures)
      throw NumericalError("estimate_wn: " + std::to_string(failures) + " failed replications at n = " +
                           std::to_string(n));
    e.replications = c.replications - failures;
    const double r = static_cast<double>(e.replications);
    e.w = static_cast<double>(e.wHits) / r;
    e.v1 = static_cast<double>(e.v1Hits) / r;
    e.v2 = static_cast<double>(e.v2Hits) / r;
    out.push_back(e);
  }
  return out;
}

std::vector<MgfCheckRow> mgf_envelope_check(const ExperimentConfig& c, const RateFunctions& rates,
                                            const std::vector<double>& lambdaGrid) {
  c.validate();
  const auto truth = c.space->model(c.theta0);
  const auto& thetas = rates.theta1();
  const std::size_t k = thetas.size();
  std::vector<DensityModel> models;
  models.reserve(k);
  for (const auto& t : thetas) models.push_back(c.space->model(t));
  std::vector<LogRatio> ratios;
  ratios.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ratios.emplace_back(models[i], truth);

  // statistics per replication: for each lambda, exp(lambda zeta_i) and exp(lambda (zeta_i - zeta_j))
  const std::size_t L = lambdaGrid.size();
  const std::size_t singles = L * k, pairs = L * k * k;
  std::vector<MgfCheckRow> out;
  for (long n : c.nGrid) {
    const long chunks = (c.replications + kChunk - 1) / kChunk;
    struct Sums {
      std::vector<double> s1, s2;
    };
    std::vector<Sums> parts(static_cast<std::size_t>(chunks));
    const double rootN = std::sqrt(static_cast<double>(n));
    for_each_chunk(0, c.replications, kChunk, c.workers, [&](long idx, long lo, long hi) {
      Sums s{std::vector<double>(singles + pairs, 0.0), std::vector<double>(singles + pairs, 0.0)};
      std::vector<double> sample(static_cast<std::size_t>(n)), zeta(k);
      for (long rep = lo; rep < hi; ++rep) {
        auto rng = replication_stream(c.masterSeed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep));
        truth.sample_into(rng, sample);
        for (std::size_t i = 0; i < k; ++i) {
          double acc = 0.0;
          for (double x : sample) acc += ratios[i](x);
          zeta[i] = (acc + static_cast<double>(n) * rates.relative_entropy(i)) / rootN;
        }
        for (std::size_t l = 0; l < L; ++l) {
          for (std::size_t i = 0; i < k; ++i) {
            const double v = std::exp(lambdaGrid[l] * zeta[i]);
            s.s1[l * k + i] += v;
            s.s2[l * k + i] += v * v;
            for (std::size_t j = 0; j < k; ++j) {
              const double w = std::exp(lambdaGrid[l] * (zeta[i] - zeta[j]));
              const std::size_t at = singles + (l * k + i) * k + j;
              s.s1[at] += w;
              s.s2[at] += w * w;
            }
          }
        }
      }
      parts[static_cast<std::size_t>(idx)] = std::move(s);
    });
    std::vector<double> s1(singles + pairs, 0.0), s2(singles + pairs, 0.0);
    for (const auto& p : parts)
      for (std::size_t q = 0; q < s1.size(); ++q) {
        s1[q] += p.s1[q];
        s2[q] += p.s2[q];
      }
    const double r = static_cast<double>(c.replications);
    auto row = [&](std::size_t at, bool increment, std::size_t l, std::size_t i, std::size_t j, double envelope) {
      MgfCheckRow m;
      m.increment = increment;
      m.lambda = lambdaGrid[l];
      m.i = i;
      m.j = j;
      m.n = n;
      m.empirical = s1[at] / r;
      const double var = std::max(0.0, s2[at] / r - m.empirical * m.empirical);
      const double se = std::sqrt(var / r);
      m.relativeStandardError = m.empirical > 0.0 ? se / m.empirical : 0.0;
      m.envelope = envelope;
      m.pass = m.empirical <= envelope * (1.0 + 3.0 * m.relativeStandardError);
      // a heavy-tailed exp(lambda zeta) makes the sample variance unreliable
      m.inconclusive = m.relativeStandardError > 0.5 || !std::isfinite(m.empirical);
      out.push_back(m);
    };
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t i = 0; i < k; ++i) row(l * k + i, false, l, i, i, std::exp(rates.nu(lambdaGrid[l])));
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          row(singles + (l * k + i) * k + j, true, l, i, j,
              std::exp(rates.nu(lambdaGrid[l] * rates.theta_distance(i, j))));
  }
  return out;
}

}  // namespace mledr
