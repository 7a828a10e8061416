#include "mledr/app.hpp"

#include <ostream>

#include <CLI11.hpp>

#include "mledr/commands.hpp"
#include "mledr/error.hpp"

namespace mledr::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Misclassification probability of the discrete MLE component: simulation, rates and bounds", "mledr"};
  app.set_version_flag("--version", MLEDR_VERSION);
  app.require_subcommand(1);

  std::string config, qnCsv, outDir, overlay;
  std::uint64_t seed = 0;
  int workers = 1;
  bool svg = false;

  auto common = [&](CLI::App* sub, bool withConfig) {
    if (withConfig) sub->add_option("--config", config, "JSON config file")->required();
    sub->add_option("--out", outDir, "output directory (MLEDR_OUT overrides)");
    sub->add_option("--seed", seed, "master seed, overrides experiment.seed");
    sub->add_option("--workers", workers, "worker threads, 0 = hardware concurrency");
    sub->add_flag("--svg", svg, "also write an SVG chart");
  };
  auto* simulate = app.add_subcommand("simulate", "estimate Q_n (and W_n) by Monte Carlo");
  common(simulate, true);
  auto* rates = app.add_subcommand("rates", "fit decay models to a qn.csv");
  common(rates, false);
  rates->add_option("qn_csv", qnCsv, "qn.csv written by simulate")->required();
  auto* divergence = app.add_subcommand("divergence", "divergence tables and rate functions");
  common(divergence, true);
  auto* bounds = app.add_subcommand("bounds", "bound curves, optionally against a qn.csv");
  common(bounds, true);
  bounds->add_option("--overlay", overlay, "qn.csv to check the bounds against");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Overrides o;
  auto* active = app.get_subcommands().front();
  if (active->count("--seed")) o.seed = seed;
  if (active->count("--workers")) o.workers = workers;
  if (active->count("--out")) o.out = outDir;
  if (bounds->count("--overlay")) o.overlay = overlay;
  o.svg = svg;

  try {
    if (simulate->parsed()) cmd_simulate(config, o, out);
    else if (rates->parsed()) cmd_rates(qnCsv, o, out);
    else if (divergence->parsed()) cmd_divergence(config, o, out);
    else cmd_bounds(config, o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

}  // namespace mledr::cli
