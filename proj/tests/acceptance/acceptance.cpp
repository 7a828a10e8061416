// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "mledr/app.hpp"
#include "mledr/bounds.hpp"
#include "mledr/divergences.hpp"
#include "mledr/error.hpp"
#include "mledr/estimation.hpp"
#include "mledr/montecarlo.hpp"

using namespace mledr;
namespace fs = std::filesystem;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::shared_ptr<ParamSpace> gaussian_two_point() {
  return std::make_shared<ParamSpace>(1, std::vector<Interval>{}, FamilyBinder::gaussian_mean(1.0));
}

std::shared_ptr<ParamSpace> tilted_pair(const DensityModel& base) {
  return std::make_shared<ParamSpace>(1, std::vector<Interval>{},
                                      FamilyBinder::fixed({base, DensityModel::tilted(base)}));
}

ExperimentConfig experiment(std::shared_ptr<ParamSpace> space, std::vector<long> nGrid, long reps, bool adaptive) {
  ExperimentConfig c;
  c.space = std::move(space);
  c.theta0 = {0, c.space->beta_dim() ? std::vector<double>(c.space->beta_dim(), 1.0) : std::vector<double>{}};
  c.nGrid = std::move(nGrid);
  c.replications = reps;
  c.masterSeed = 20240601;
  c.confidenceLevel = 0.99;
  c.adaptive = adaptive;
  c.maxReplications = 2000000;
  c.minHits = 50;
  c.workers = 0;
  return c;
}

void print_cells(std::ostream& log, const std::vector<QnEstimate>& cells) {
  for (const auto& e : cells)
    log << "    n=" << e.n << " hits=" << e.hits << " reps=" << e.replications << " pHat=" << e.pHat
        << (e.measurable ? "" : " (unmeasurable)") << '\n';
}

// 1
Verdict gaussian_oracle(std::ostream& log) {
  Verdict v;
  Stopwatch t;
  const auto cells = estimate_qn(experiment(gaussian_two_point(), {1, 4, 9, 16}, 200000, false));
  for (const auto& e : cells) {
    const double derived = 1.0 - normal_cdf(std::sqrt(double(e.n)) / 2.0);
    const double printed = 1.0 - normal_cdf(std::sqrt(double(e.n)));
    log << "    n=" << e.n << " pHat=" << e.pHat << " band=[" << e.wilsonLow << ", " << e.wilsonHigh
        << "] 1-Phi(sqrt(n)/2)=" << derived << " 1-Phi(sqrt(n))=" << printed << '\n';
    v.require(e.wilsonLow <= derived && derived <= e.wilsonHigh, "oracle outside band at n=" + std::to_string(e.n));
  }
  const double s = t.seconds();
  v.require(s < 60.0, "runtime");
  v.detail << "4 cells x 2e5 replications in " << s << " s";
  return v;
}

// 2
Verdict rate_consistency(std::ostream& log) {
  Verdict v;
  const auto space = gaussian_two_point();
  const double lower = lower_bound_rate(*space, {0, {}});
  v.require(std::abs(lower - 0.125) <= 1e-6, "lower_bound_rate");

  const std::vector<long> ns{16, 24, 32, 40, 48, 56, 64};
  const auto cells = estimate_qn(experiment(space, ns, 200000, true));
  print_cells(log, cells);
  const auto fit = fit_rate(cells);
  const auto& sel = fit.selected();
  const double slope = fit.fit(RateModel::Exponential).parameter;
  log << "    selected=" << to_string(sel.model) << " exponential slope=" << slope << '\n';
  v.require(sel.model == RateModel::Exponential, "selected model is " + to_string(sel.model));
  v.require(std::abs(slope + 0.125) <= 0.15 * 0.125, "exponential slope");

  const RateFunctions rates(*space, {0, {}}, {{1, {}}});
  int broken = 0;
  for (const auto& e : cells) {
    const double lo = std::exp(-1.5 * double(e.n) * lower);
    const double hi = rates.upper_bound_Qn(e.n).value;
    const bool ok = lo <= e.pHat && e.pHat <= hi;
    log << "    n=" << e.n << " lower=" << lo << " pHat=" << e.pHat << " wilsonHigh=" << e.wilsonHigh
        << " upper=" << hi << (ok ? "" : "  <- sandwich broken") << '\n';
    broken += !ok;
  }
  v.require(broken == 0, std::to_string(broken) + " sandwich violations");
  v.detail << "lower_bound_rate=" << lower << " slope=" << slope;
  return v;
}

// 3
Verdict divergence_oracles(std::ostream&) {
  Verdict v;
  Stopwatch t;
  const auto f = DensityModel::gaussian(0, 1), g = DensityModel::gaussian(1, 1);
  const double h = hellinger(0.5, f, g).value, kl = kl_divergence(f, g).value;
  v.require(std::abs(h - std::exp(-0.125)) <= 1e-8, "hellinger");
  v.require(std::abs(kl - 0.5) <= 1e-8, "kl");
  RandomStream rng(7, 3, 0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto a = DensityModel::gaussian(4 * rng.uniform() - 2, 0.5 + rng.uniform());
    const auto b = DensityModel::gaussian(4 * rng.uniform() - 2, 0.5 + rng.uniform());
    const double lambda = 0.05 + 0.9 * rng.uniform();
    worst = std::max(worst, std::abs(hellinger3(lambda, a, b, b).value - hellinger(lambda, a, b).value));
  }
  v.require(worst <= 1e-8, "hellinger3 reduction");
  const double s = t.seconds();
  v.require(s < 10.0, "runtime");
  v.detail << "hellinger error=" << std::abs(h - std::exp(-0.125)) << " kl error=" << std::abs(kl - 0.5)
           << " worst reduction error=" << worst << " in " << s << " s";
  return v;
}

double qg_mass(const DensityModel& m, double center) {
  boost::math::quadrature::exp_sinh<double> es;
  const double right = es.integrate([&](double t) { return m.density(center + t); });
  const double left = es.integrate([&](double t) { return m.density(center - t); });
  return left + right;
}

QuasiGaussianParams qg(double center, WeightExponents e, double sigma, double split) {
  QuasiGaussianParams p;
  p.center = center;
  p.exponents = e;
  p.sigma = sigma;
  const double c1 = split * sigma * std::sqrt(2 * M_PI) / moment_integral(e.alphaNeg, sigma);
  const auto c = qg_normalize(e, sigma, FixedSide::C1, c1);
  p.c1 = c.c1;
  p.c2 = c.c2;
  return p;
}

// 4
Verdict quasi_gaussian(std::ostream& log) {
  Verdict v;
  double worstMass = 0.0;
  for (const auto& e : {WeightExponents{0.0, 1.0}, WeightExponents{0.5, 0.5}, WeightExponents{2.0, 0.3}})
    for (double sigma : {0.5, 1.0, 2.0})
      for (double split : {0.2, 0.5, 0.8}) {
        const auto p = qg(0.3, e, sigma, split);
        worstMass = std::max(worstMass, std::abs(qg_mass(DensityModel::quasi_gaussian(p), 0.3) - 1.0));
      }
  v.require(worstMass <= 1e-8, "normalization");

  QuasiGaussianParams plain;
  plain.exponents = {0.0, 0.0};
  const auto gauss = DensityModel::quasi_gaussian(plain);
  double worstPoint = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = -8.0 + 16.0 * i / 999.0;
    worstPoint = std::max(worstPoint, std::abs(gauss.density(x) - normal_pdf(x)));
  }
  v.require(worstPoint <= 1e-12, "gaussian reduction");

  // independent quasi-Gaussian coordinates with a common sigma and symmetric exponents
  MixtureModel mix;
  mix.weights = {1.0};
  mix.components = {{qg(0.0, {0.5, 0.5}, 1.3, 0.3), qg(0.0, {1.5, 1.5}, 1.3, 0.7)}};
  mix.dim = 2;
  const auto joint = DensityModel::mixture(mix);
  RandomStream rng(11, 4, 0);
  const std::size_t draws = 100000;
  const auto xy = joint.sample_vectors(rng, draws);
  std::vector<double> rho(draws), angle(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    const auto p = polar_decompose(xy[2 * i], xy[2 * i + 1]);
    rho[i] = p.rho;
    angle[i] = p.angle;
  }
  auto cuts = [](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::vector<double> c;
    for (int k = 1; k < 8; ++k) c.push_back(xs[xs.size() * k / 8]);
    return c;
  };
  const auto rc = cuts(rho), ac = cuts(angle);
  auto bin = [](const std::vector<double>& c, double x) {
    return static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), x) - c.begin());
  };
  double table[8][8] = {};
  double rows[8] = {}, cols[8] = {};
  for (std::size_t i = 0; i < draws; ++i) {
    const auto r = bin(rc, rho[i]), a = bin(ac, angle[i]);
    table[r][a] += 1;
    rows[r] += 1;
    cols[a] += 1;
  }
  double chi2 = 0.0;
  for (int r = 0; r < 8; ++r)
    for (int a = 0; a < 8; ++a) {
      const double expected = rows[r] * cols[a] / double(draws);
      chi2 += (table[r][a] - expected) * (table[r][a] - expected) / expected;
    }
  const double critical = boost::math::quantile(boost::math::complement(boost::math::chi_squared(49), 0.001));
  log << "    chi-square=" << chi2 << " critical(49 df, 0.001)=" << critical << '\n';
  v.require(chi2 < critical, "polar independence rejected");
  v.detail << "worst mass error=" << worstMass << " worst reduction error=" << worstPoint << " chi2=" << chi2;
  return v;
}

// 5
Verdict stretched_regime(std::ostream& log) {
  Verdict v;
  Stopwatch t;
  const auto cells = estimate_qn(
      experiment(tilted_pair(DensityModel::stretched_exp(0.5)), {2, 4, 8, 12, 16, 24, 32, 48, 64}, 200000, true));
  print_cells(log, cells);
  double slope = std::nan("");
  try {
    const auto fit = fit_rate(cells);
    slope = fit.fit(RateModel::Stretched).parameter;
    log << "    selected=" << to_string(fit.selected().model) << " exponential slope="
        << fit.fit(RateModel::Exponential).parameter << '\n';
  } catch (const DomainError& e) {
    v.require(false, e.what());
  }
  v.require(std::abs(slope - 0.5) <= 0.2, "stretched slope");
  for (const auto& e : cells) v.require(e.replications <= 2000000, "replication cap");
  const double s = t.seconds();
  v.require(s < 600.0, "runtime");
  v.detail << "slope of ln(-ln Q) on ln n=" << slope << " in " << s << " s";
  return v;
}

// 6
Verdict heavy_tail_regimes(std::ostream& log) {
  Verdict v;
  Stopwatch t;
  const auto stable = estimate_qn(
      experiment(tilted_pair(DensityModel::stable(1.5)), {8, 16, 32, 64, 128, 256, 512}, 200000, true));
  log << "    stable alpha=1.5\n";
  print_cells(log, stable);
  double exponent = std::nan("");
  try {
    const auto fit = fit_rate(stable);
    exponent = fit.fit(RateModel::Polynomial).parameter;
    log << "    selected=" << to_string(fit.selected().model) << '\n';
  } catch (const DomainError& e) {
    v.require(false, e.what());
  }
  v.require(std::abs(exponent - 0.5) <= 0.15, "polynomial exponent");

  const auto cauchy =
      estimate_qn(experiment(tilted_pair(DensityModel::cauchy()), {16, 64, 256, 1024}, 200000, true));
  log << "    cauchy\n";
  print_cells(log, cauchy);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& e : cauchy) {
    const double q = e.pHat * std::log(double(e.n));
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  const double ratio = hi / lo;
  v.require(lo > 0.0 && ratio <= 1.6, "Q ln n ratio");
  const double s = t.seconds();
  v.require(s < 600.0, "runtime");
  v.detail << "stable exponent=" << exponent << " cauchy max/min of Q ln n=" << ratio << " in " << s << " s";
  return v;
}

// 7
Verdict bound_domination(std::ostream& log) {
  Verdict v;
  const auto base = DensityModel::power_tail(3.0);
  const double p = 2.5;
  const auto k = tilted_pair_constants(base, p);
  log << "    E|xi|=" << k.meanAbs << " ln C=" << k.logTilt << " d=" << k.gap << " moment norm=" << k.momentNorm << '\n';
  const auto cells = estimate_qn(experiment(tilted_pair(base), {4, 16, 64, 256}, 200000, false));
  int broken = 0;
  for (const auto& e : cells) {
    const auto b = rosenthal_bound(p, k.momentNorm, k.gap, e.n);
    log << "    n=" << e.n << " pHat=" << e.pHat << " rosenthal=" << b.value << (b.clamped ? " (clamped)" : "") << '\n';
    broken += b.value < e.pHat;
  }
  v.require(broken == 0, std::to_string(broken) + " rosenthal violations");

  std::ostringstream slopes;
  for (double q : {1.0, 2.0}) {
    const auto T = TailFunction::weibull(q, 1.0);
    std::vector<double> xs, ys;
    // W[T](d sqrt(n)) with d = 1 against n
    for (double n = 1 << 12; n <= 1 << 24; n *= 4) {
      xs.push_back(std::log(n));
      ys.push_back(std::log(-tail_transform_W(T, std::sqrt(n)).logRaw));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= xs.size(), my /= xs.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    const double slope = sxy / sxx;
    v.require(std::abs(slope - q / (q + 2)) <= 0.1, "W exponent for q=" + std::to_string(int(q)));
    slopes << " q=" << q << ":" << slope << " (target " << q / (q + 2) << ")";
  }
  v.detail << "rosenthal p=" << p << " dominates at " << cells.size() - broken << "/" << cells.size()
           << " cells; W exponents" << slopes.str();
  return v;
}

// 8
Verdict mgf_envelopes(std::ostream& log) {
  Verdict v;
  auto c = experiment(std::make_shared<ParamSpace>(1, std::vector<Interval>{{1.0, 2.0}}, FamilyBinder::gaussian_mean(1.0)),
                      {4, 16}, 20000, false);
  const RateFunctions rates(*c.space, c.theta0, {{1, {1.0}}, {1, {1.5}}, {1, {2.0}}});
  const auto rows = mgf_envelope_check(c, rates, {0.25, 0.5, 1.0});
  int failed = 0, inconclusive = 0;
  for (const auto& r : rows) {
    failed += !r.pass;
    inconclusive += r.inconclusive;
    if (!r.pass)
      log << "    " << (r.increment ? "increment" : "single") << " lambda=" << r.lambda << " n=" << r.n
          << " empirical=" << r.empirical << " envelope=" << r.envelope << '\n';
  }
  v.require(failed == 0, std::to_string(failed) + " cells above the envelope");
  v.detail << rows.size() << " cells, " << failed << " failed, " << inconclusive << " inconclusive";
  return v;
}

// 9
Verdict determinism(std::ostream&) {
  Verdict v;
  const auto dir = fs::temp_directory_path() / ("mledr_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"family": {"binder": "gaussian_mean", "step": 1.0}, "space": {"n_max": 1},
    "theta0": {"m": 0}, "experiment": {"n_grid": [1, 4, 9, 16], "replications": 50000, "seed": 31}})";
  std::ostringstream out, err;
  const int a = cli::run({"simulate", "--config", cfg.string(), "--out", (dir / "w1").string(), "--workers", "1"}, out, err);
  const int b = cli::run({"simulate", "--config", cfg.string(), "--out", (dir / "w4").string(), "--workers", "4"}, out, err);
  v.require(a == 0 && b == 0, "simulate exit codes " + std::to_string(a) + "," + std::to_string(b) + ": " + err.str());
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  const auto x = slurp(dir / "w1" / "qn.csv"), y = slurp(dir / "w4" / "qn.csv");
  v.require(!x.empty() && x == y, "qn.csv differs");
  v.detail << "qn.csv with 1 and 4 workers: " << (x == y ? "byte-identical" : "different") << " (" << x.size()
           << " bytes)";
  fs::remove_all(dir);
  return v;
}

// 10
Verdict estimator_sanity(std::ostream&) {
  Verdict v;
  const ParamSpace space(1, {{0.5, 2.0}}, FamilyBinder::gaussian_sd(1.0));
  const ParamPoint theta0{0, {1.0}};
  const auto truth = space.model(theta0);
  const int trials = 1000, n = 100;
  int correct = 0, interior = 0;
  double worst = 0.0;
  std::vector<double> xs(n);
  for (int trial = 0; trial < trials; ++trial) {
    RandomStream rng(20240601, n, trial);
    truth.sample_into(rng, xs);
    const auto r = mle(xs, space, theta0);
    correct += r.tauHat == 0;
    if (r.boundaryFlag) continue;
    const ParamPoint hat{r.tauHat, r.betaHat};
    const auto& box = space.box()[0];
    if (r.betaHat[0] <= box.lower || r.betaHat[0] >= box.upper) continue;
    ++interior;
    worst = std::max(worst, stationarity_residual(xs, hat, space, theta0));
  }
  v.require(worst < 1e-4, "stationarity residual");
  v.require(correct >= 990, "consistency");
  v.require(interior > 0, "no interior optima");
  v.detail << "correct=" << correct << "/" << trials << " worst residual=" << worst << " over " << interior
           << " interior optima";
  return v;
}

}  // namespace

int main() {
  ::unsetenv("MLEDR_OUT");
  const std::vector<std::pair<std::string, std::function<Verdict(std::ostream&)>>> criteria{
      {"gaussian two-point oracle", gaussian_oracle},
      {"rate machinery consistency", rate_consistency},
      {"divergence oracles", divergence_oracles},
      {"quasi-gaussian family", quasi_gaussian},
      {"stretched-exponential regime", stretched_regime},
      {"stable and cauchy regimes", heavy_tail_regimes},
      {"bound domination", bound_domination},
      {"mgf envelopes", mgf_envelopes},
      {"determinism", determinism},
      {"estimator sanity", estimator_sanity},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::ostringstream log;
    Verdict v;
    try {
      v = criteria[i].second(log);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    std::cout << log.str();
    std::cout << "criterion " << i + 1 << " " << (v.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
              << v.detail.str() << std::endl;
    failures += !v.pass;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
