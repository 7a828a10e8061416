#include "mledr/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "mledr/bounds.hpp"
#include "mledr/config.hpp"
#include "mledr/divergences.hpp"
#include "mledr/error.hpp"
#include "mledr/montecarlo.hpp"
#include "mledr/output.hpp"

namespace mledr::cli {
namespace {

namespace fs = std::filesystem;

fs::path resolve_out(const Overrides& o, const fs::path& fallback) {
  if (const char* env = std::getenv("MLEDR_OUT"); env && *env) return env;
  if (o.out) return *o.out;
  return fallback;
}

RunConfig load(const fs::path& config, const Overrides& o) {
  auto rc = load_config(config);
  if (o.seed) rc.experiment.masterSeed = *o.seed;
  if (o.workers) {
    if (*o.workers < 0) throw ConfigError("--workers: must be >= 0");
    rc.experiment.workers = *o.workers;
  }
  if (o.overlay) rc.bounds.overlay = *o.overlay;
  rc.svg = rc.svg || o.svg;
  return rc;
}

nlohmann::json resolved(const RunConfig& rc) {
  nlohmann::json j = rc.raw;
  if (rc.hasExperiment) j["experiment_resolved"] = describe(rc.experiment);
  return j;
}

std::vector<QnEstimate> read_qn(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("qn.csv: cannot open " + path.string());
  return read_qn_csv(in);
}

// An upper bound evaluated at n, or a lower prediction / shape that is not
// checked against the estimates.
struct BoundCurve {
  std::string name;
  bool upper = true;
  std::function<BoundValue(long)> at;
};

// SVG output is best-effort and never changes the outcome of a command.
void best_effort(std::ostream& log, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    log << "svg skipped: " << e.what() << '\n';
  }
}

}  // namespace

void cmd_simulate(const fs::path& config, const Overrides& o, std::ostream& log) {
  auto rc = load(config, o);
  if (!rc.hasExperiment) throw ConfigError("experiment: missing section");
  rc.experiment.validate();
  OutputDir out(resolve_out(o, rc.outDir));
  std::vector<QnEstimate> qn;
  out.timed("estimate_qn", [&] { qn = estimate_qn(rc.experiment); });
  out.write("qn.csv", [&](std::ostream& s) { write_qn_csv(s, qn, rc.experiment.masterSeed); });
  for (const auto& e : qn)
    log << "n=" << e.n << " hits=" << e.hits << " reps=" << e.replications << " pHat=" << e.pHat << " ["
        << e.wilsonLow << ", " << e.wilsonHigh << "]\n";
  if (rc.wnU) {
    std::vector<WnEstimate> wn;
    out.timed("estimate_wn", [&] { wn = estimate_wn(rc.experiment, *rc.wnU); });
    out.write("wn.csv", [&](std::ostream& s) { write_wn_csv(s, wn, *rc.wnU, rc.experiment.masterSeed); });
  }
  if (rc.svg) {
    Series p{"pHat", {}, {}}, lo{"wilsonLow", {}, {}}, hi{"wilsonHigh", {}, {}};
    for (const auto& e : qn) {
      p.x.push_back(e.n), p.y.push_back(e.pHat);
      lo.x.push_back(e.n), lo.y.push_back(e.wilsonLow);
      hi.x.push_back(e.n), hi.y.push_back(e.wilsonHigh);
    }
    best_effort(log, [&] {
      out.write("qn.svg", [&](std::ostream& s) { write_svg_chart(s, "Q_n estimate", "n", {p, lo, hi}); });
    });
  }
  out.write_manifest("simulate", config, resolved(rc));
}

void cmd_rates(const fs::path& qnCsv, const Overrides& o, std::ostream& log) {
  const auto qn = read_qn(qnCsv);
  RateFitSummary summary;
  try {
    summary = fit_rate(qn);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("qn.csv: ") + e.what());
  }
  OutputDir out(resolve_out(o, "mledr_out"));
  out.write("rates.csv", [&](std::ostream& s) { write_rates_csv(s, summary); });
  out.write("plotdata.csv", [&](std::ostream& s) { write_plotdata_csv(s, summary); });
  const auto& sel = summary.selected();
  log << "selected=" << to_string(sel.model) << " parameter=" << sel.parameter << " rSquared=" << sel.rSquared << '\n';
  if (o.svg) {
    Series data{"ln pHat", {}, {}};
    for (const auto& e : qn)
      if (e.pHat > 0.0) data.x.push_back(e.n), data.y.push_back(e.pHat);
    best_effort(log, [&] {
      out.write("rates.svg", [&](std::ostream& s) { write_svg_chart(s, "Q_n estimate", "n", {data}); });
    });
  }
  out.extra()["selected"] = to_string(sel.model);
  out.extra()["excluded_n"] = summary.excluded;
  out.write_manifest("rates", qnCsv, nlohmann::json{{"input", qnCsv.string()}});
}

void cmd_divergence(const fs::path& config, const Overrides& o, std::ostream& log) {
  auto rc = load(config, o);
  const auto& d = rc.divergence;
  if (d.theta1.empty()) throw ConfigError("divergence.theta1: the space has no alternatives (space.n_max = 0)");
  OutputDir out(resolve_out(o, rc.outDir));
  const auto f0 = rc.space->model(rc.theta0);
  out.timed("divergence_table", [&] {
    out.write("divergence.csv", [&](std::ostream& s) {
      s.precision(17);
      s << "# theta0=" << to_string(rc.theta0) << "\ntheta,kl,klError,divergent";
      for (double l : d.lambdaGrid) s << ",hellinger_" << l;
      s << '\n';
      for (const auto& t : d.theta1) {
        const auto ft = rc.space->model(t);
        const auto kl = kl_divergence(f0, ft);
        s << '"' << to_string(t) << "\"," << kl.value << ',' << kl.absoluteErrorEstimate << ',' << (kl.divergent ? 1 : 0);
        for (double l : d.lambdaGrid) s << ',' << hellinger(l, ft, f0).value;
        s << '\n';
      }
    });
  });
  if (d.rates) {
    std::unique_ptr<RateFunctions> rates;
    out.timed("rate_functions", [&] { rates = std::make_unique<RateFunctions>(*rc.space, rc.theta0, d.theta1); });
    out.write("nu.csv", [&](std::ostream& s) { rates->write_nu_csv(s); });
    out.write("G.csv", [&](std::ostream& s) { rates->write_G_csv(s); });
    std::vector<double> u = d.mUGrid;
    if (u.empty())
      for (long n : {1L, 4L, 16L, 64L, 256L}) u.push_back(rates->min_relative_entropy() * std::sqrt(double(n)));
    out.write("M.csv", [&](std::ostream& s) { rates->write_M_csv(s, u); });
    out.write("distance.csv", [&](std::ostream& s) {
      s.precision(17);
      s << "i,j,distance\n";
      const std::size_t k = d.theta1.size();
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) s << i << ',' << j << ',' << rates->theta_distance(i, j) << '\n';
    });
    double lower = 0.0;
    out.timed("lower_bound_rate", [&] { lower = lower_bound_rate(*rc.space, rc.theta0); });
    out.extra()["rates"] = {{"lambda0", rates->lambda0()},
                            {"min_relative_entropy", rates->min_relative_entropy()},
                            {"lower_rate", lower},
                            {"nu_range_exceeded", rates->nu_range_exceeded()}};
    log << "lambda0=" << rates->lambda0() << " minH=" << rates->min_relative_entropy() << " lowerRate=" << lower << '\n';
    if (!d.mgfNGrid.empty()) {
      ExperimentConfig x = rc.experiment;
      x.nGrid = d.mgfNGrid;
      x.replications = d.mgfReplications;
      x.adaptive = false;
      x.validate();
      std::vector<MgfCheckRow> rows;
      out.timed("mgf_check", [&] { rows = mgf_envelope_check(x, *rates, d.mgfLambdaGrid); });
      long failed = 0;
      out.write("mgf.csv", [&](std::ostream& s) {
        s.precision(17);
        s << "kind,lambda,i,j,n,empirical,envelope,relativeStandardError,pass,inconclusive\n";
        for (const auto& r : rows) {
          s << (r.increment ? "increment" : "single") << ',' << r.lambda << ',' << r.i << ',' << r.j << ',' << r.n << ','
            << r.empirical << ',' << r.envelope << ',' << r.relativeStandardError << ',' << (r.pass ? 1 : 0) << ','
            << (r.inconclusive ? 1 : 0) << '\n';
          if (!r.pass && !r.inconclusive) ++failed;
        }
      });
      out.extra()["mgf_failures"] = failed;
      log << "mgf checks: " << rows.size() << " cells, " << failed << " failed\n";
    }
  }
  out.write_manifest("divergence", config, resolved(rc));
}

void cmd_bounds(const fs::path& config, const Overrides& o, std::ostream& log) {
  auto rc = load(config, o);
  auto& b = rc.bounds;
  std::vector<QnEstimate> overlay;
  if (b.overlay) overlay = read_qn(*b.overlay);
  std::vector<long> nGrid = b.nGrid;
  if (nGrid.empty())
    for (const auto& e : overlay) nGrid.push_back(e.n);
  if (nGrid.empty()) nGrid = rc.experiment.nGrid;
  if (nGrid.empty()) throw ConfigError("bounds.n_grid: must not be empty (or give an overlay)");

  OutputDir out(resolve_out(o, rc.outDir));
  std::vector<BoundCurve> curves;
  std::shared_ptr<RateFunctions> rates;
  if (b.theorem || b.lowerPrediction) {
    if (rc.divergence.theta1.empty()) throw ConfigError("bounds.theorem: the space has no alternatives");
    out.timed("rate_functions", [&] {
      rates = std::make_shared<RateFunctions>(*rc.space, rc.theta0, rc.divergence.theta1);
    });
  }
  if (b.theorem) curves.push_back({"theorem", true, [rates](long n) { return rates->upper_bound_Qn(n); }});
  if (b.lowerPrediction) {
    const double r = rates->lower_rate();
    curves.push_back({"lower_prediction", false, [r](long n) {
                        BoundValue v;
                        v.logRaw = -1.5 * static_cast<double>(n) * r;
                        v.raw = v.value = std::exp(v.logRaw);
                        return v;
                      }});
  }
  if (b.rosenthal) {
    const auto r = *b.rosenthal;
    curves.push_back({"rosenthal", true, [r](long n) { return rosenthal_bound(r.p, r.momentNorm, r.d, n); }});
  }
  if (b.gl) {
    const auto g = *b.gl;
    std::shared_ptr<PsiFunction> psi;
    out.timed("gl_psi", [&] {
      if (g.powerExponent) {
        const double k = *g.powerExponent;
        psi = std::make_shared<PsiFunction>(PsiFunction::analytic([k](double p) { return std::pow(p, k); }, 2.0,
                                                                  std::numeric_limits<double>::infinity()));
      } else {
        auto grid = g.pGrid.empty() ? linear_grid(2.0, 40.0, 153) : g.pGrid;
        psi = std::make_shared<PsiFunction>(gl_natural_psi(*g.model, grid));
      }
    });
    curves.push_back({"gl", true, [psi, g](long n) { return gl_bound(*psi, g.d, n); }});
  }
  if (b.martingale) {
    const auto m = *b.martingale;
    curves.push_back({"martingale", true, [m](long n) {
                        return martingale_moment_bound(m.p, std::vector<double>(static_cast<std::size_t>(n), m.norm), m.d, n);
                      }});
  }
  if (b.tail) {
    const auto t = *b.tail;
    const auto T = TailFunction::weibull(t.q, t.K);
    curves.push_back({"tail_transform", true,
                      [t, T](long n) { return tail_transform_W(T, t.d * std::sqrt(static_cast<double>(n))); }});
  }
  if (b.baumKatzP) {
    const double p = *b.baumKatzP;
    curves.push_back({"baum_katz_shape", false, [p](long n) {
                        BoundValue v;
                        v.raw = v.value = baum_katz_shape(p, n);
                        v.logRaw = std::log(v.raw);
                        return v;
                      }});
  }
  if (curves.empty()) throw ConfigError("bounds: no bound selected");

  std::vector<BoundRow> rows;
  out.timed("evaluate", [&] {
    for (const auto& c : curves)
      for (long n : nGrid) rows.push_back({c.name, n, c.at(n)});
  });
  out.write("bounds.csv", [&](std::ostream& s) { write_bounds_csv(s, rows); });

  if (!overlay.empty()) {
    nlohmann::json violations = nlohmann::json::object();
    long total = 0;
    out.write("overlay.csv", [&](std::ostream& s) {
      s.precision(17);
      s << "bound,n,boundValue,pHat,wilsonLow,violation\n";
      for (const auto& c : curves) {
        if (!c.upper) continue;
        long count = 0;
        for (const auto& e : overlay) {
          const double v = c.at(e.n).value;
          const bool bad = v < e.wilsonLow;
          count += bad;
          s << c.name << ',' << e.n << ',' << v << ',' << e.pHat << ',' << e.wilsonLow << ',' << (bad ? 1 : 0) << '\n';
        }
        violations[c.name] = count;
        total += count;
        log << c.name << ": violations=" << count << '\n';
      }
    });
    out.extra()["violations"] = violations;
    out.extra()["violations_total"] = total;
  }
  if (rc.svg) {
    std::vector<Series> series;
    for (const auto& c : curves) {
      Series s{c.name, {}, {}};
      for (const auto& r : rows)
        if (r.bound == c.name) s.x.push_back(r.n), s.y.push_back(r.value.value);
      series.push_back(std::move(s));
    }
    if (!overlay.empty()) {
      Series s{"pHat", {}, {}};
      for (const auto& e : overlay) s.x.push_back(e.n), s.y.push_back(e.pHat);
      series.push_back(std::move(s));
    }
    best_effort(log, [&] {
      out.write("bounds.svg", [&](std::ostream& s) { write_svg_chart(s, "Bounds on Q_n", "n", series); });
    });
  }
  out.write_manifest("bounds", config, resolved(rc));
}

}  // namespace mledr::cli
