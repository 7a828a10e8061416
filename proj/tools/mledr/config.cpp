#include "mledr/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "mledr/bounds.hpp"
#include "mledr/error.hpp"
#include "mledr/serialization.hpp"

namespace mledr::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError(field + ": " + message);
}

const json* find(const json& section, const char* key) {
  if (!section.is_object()) return nullptr;
  auto it = section.find(key);
  return it == section.end() ? nullptr : &*it;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

long integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<long>();
}

bool boolean(const json& v, const std::string& field) {
  if (!v.is_boolean()) fail(field, "expected true or false");
  return v.get<bool>();
}

double number_or(const json& section, const char* key, const std::string& prefix, double fallback) {
  const json* v = find(section, key);
  return v ? number(*v, prefix + "." + key) : fallback;
}

std::vector<double> numbers(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<long> integers(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of integers");
  std::vector<long> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(integer(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

DensityModel density(const json& v, const std::string& field) {
  try {
    return density_from_json(v);
  } catch (const Error& e) {
    fail(field, e.what());
  }
}

ParamPoint point(const json& v, const std::string& field) {
  if (!v.is_object()) fail(field, "expected an object {\"m\": ..., \"beta\": [...]}");
  ParamPoint p;
  const json* m = find(v, "m");
  if (!m) fail(field + ".m", "missing");
  p.m = static_cast<int>(integer(*m, field + ".m"));
  if (const json* b = find(v, "beta")) p.beta = numbers(*b, field + ".beta");
  return p;
}

struct Family {
  FamilyBinder binder;
  std::optional<DensityModel> tiltBase;
};

Family family(const json& f) {
  if (!f.is_object()) fail("family", "missing or not an object");
  const json* kind = find(f, "binder");
  if (!kind || !kind->is_string()) fail("family.binder", "expected one of gaussian_mean, gaussian_sd, fixed, location, tilted_pair");
  const auto name = kind->get<std::string>();
  auto levels = [&]() {
    const json* l = find(f, "levels");
    if (!l || !l->is_array() || l->size() < 1) fail("family.levels", "expected a non-empty array of density records");
    std::vector<DensityModel> out;
    for (std::size_t i = 0; i < l->size(); ++i) out.push_back(density((*l)[i], "family.levels[" + std::to_string(i) + "]"));
    return out;
  };
  try {
    if (name == "gaussian_mean")
      return {FamilyBinder::gaussian_mean(number_or(f, "step", "family", 1.0), number_or(f, "sigma", "family", 1.0)), {}};
    if (name == "gaussian_sd")
      return {FamilyBinder::gaussian_sd(number_or(f, "step", "family", 1.0), number_or(f, "sigma", "family", 1.0)), {}};
    if (name == "fixed") return {FamilyBinder::fixed(levels()), {}};
    if (name == "location") return {FamilyBinder::location(levels()), {}};
    if (name == "tilted_pair") {
      const json* b = find(f, "base");
      if (!b) fail("family.base", "missing");
      const auto base = density(*b, "family.base");
      auto tilted = DensityModel::tilted(base);
      const json* rev = find(f, "reversed");
      if (rev && boolean(*rev, "family.reversed")) return {FamilyBinder::fixed({tilted, base}), base};
      return {FamilyBinder::fixed({base, tilted}), base};
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail("family", e.what());
  }
  fail("family.binder", "unknown binder '" + name + "'");
}

void experiment(const json& e, RunConfig& rc) {
  auto& x = rc.experiment;
  x.space = rc.space;
  x.theta0 = rc.theta0;
  if (const json* v = find(e, "n_grid")) x.nGrid = integers(*v, "experiment.n_grid");
  if (const json* v = find(e, "replications")) x.replications = integer(*v, "experiment.replications");
  if (const json* v = find(e, "seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
      fail("experiment.seed", "expected a non-negative 64-bit integer");
    x.masterSeed = v->get<std::uint64_t>();
  }
  x.confidenceLevel = number_or(e, "confidence_level", "experiment", x.confidenceLevel);
  if (const json* v = find(e, "adaptive")) x.adaptive = boolean(*v, "experiment.adaptive");
  if (const json* v = find(e, "max_replications")) x.maxReplications = integer(*v, "experiment.max_replications");
  if (const json* v = find(e, "min_hits")) x.minHits = integer(*v, "experiment.min_hits");
  if (const json* v = find(e, "workers")) x.workers = static_cast<int>(integer(*v, "experiment.workers"));
  if (const json* v = find(e, "wn_u")) rc.wnU = number(*v, "experiment.wn_u");
  if (const json* o = find(e, "optimizer")) {
    if (const json* v = find(*o, "grid_points"))
      x.optimizer.gridPointsPerCoordinate = static_cast<int>(integer(*v, "experiment.optimizer.grid_points"));
    if (const json* v = find(*o, "starts")) x.optimizer.starts = static_cast<int>(integer(*v, "experiment.optimizer.starts"));
  }
  x.validate();
}

void divergence(const json& d, RunConfig& rc) {
  auto& s = rc.divergence;
  if (const json* t = find(d, "theta1")) {
    if (!t->is_array()) fail("divergence.theta1", "expected an array of points");
    for (std::size_t i = 0; i < t->size(); ++i) {
      auto p = point((*t)[i], "divergence.theta1[" + std::to_string(i) + "]");
      if (!rc.space->contains(p)) fail("divergence.theta1[" + std::to_string(i) + "]", "outside the parameter space");
      s.theta1.push_back(std::move(p));
    }
  }
  if (s.theta1.empty()) {
    int ppc = 3;
    if (const json* v = find(d, "grid_points")) ppc = static_cast<int>(integer(*v, "divergence.grid_points"));
    if (rc.space->n_max() >= 1) s.theta1 = rc.space->grid(1, rc.space->n_max(), rc.space->beta_dim() == 0 ? 1 : ppc);
  }
  if (const json* v = find(d, "lambda_grid")) s.lambdaGrid = numbers(*v, "divergence.lambda_grid");
  if (const json* v = find(d, "rates")) s.rates = boolean(*v, "divergence.rates");
  if (const json* v = find(d, "m_u")) s.mUGrid = numbers(*v, "divergence.m_u");
  if (const json* m = find(d, "mgf_check")) {
    if (const json* v = find(*m, "n_grid")) s.mgfNGrid = integers(*v, "divergence.mgf_check.n_grid");
    if (const json* v = find(*m, "lambda_grid")) s.mgfLambdaGrid = numbers(*v, "divergence.mgf_check.lambda_grid");
    if (const json* v = find(*m, "replications")) s.mgfReplications = integer(*v, "divergence.mgf_check.replications");
  }
}

void bounds(const json& b, RunConfig& rc) {
  auto& s = rc.bounds;
  if (const json* v = find(b, "n_grid")) s.nGrid = integers(*v, "bounds.n_grid");
  if (const json* v = find(b, "theorem")) s.theorem = boolean(*v, "bounds.theorem");
  if (const json* v = find(b, "lower_prediction")) s.lowerPrediction = boolean(*v, "bounds.lower_prediction");
  if (const json* r = find(b, "rosenthal")) {
    RosenthalSection x;
    x.p = number_or(*r, "p", "bounds.rosenthal", x.p);
    if (!(x.p > 2.0)) fail("bounds.rosenthal.p", "must exceed 2");
    const json* autoFlag = find(*r, "auto");
    if (autoFlag && boolean(*autoFlag, "bounds.rosenthal.auto")) {
      if (!rc.tiltBase) fail("bounds.rosenthal.auto", "needs a tilted_pair family");
      const auto c = tilted_pair_constants(*rc.tiltBase, x.p);
      if (!std::isfinite(c.momentNorm)) fail("bounds.rosenthal.p", "moment of order p diverges for this base");
      x.momentNorm = c.momentNorm;
      x.d = c.gap;
    } else {
      x.momentNorm = number_or(*r, "moment_norm", "bounds.rosenthal", x.momentNorm);
      x.d = number_or(*r, "d", "bounds.rosenthal", x.d);
    }
    s.rosenthal = x;
  }
  if (const json* g = find(b, "gl")) {
    GlSection x;
    x.d = number_or(*g, "d", "bounds.gl", x.d);
    if (const json* v = find(*g, "power")) x.powerExponent = number(*v, "bounds.gl.power");
    if (const json* v = find(*g, "model")) x.model = density(*v, "bounds.gl.model");
    if (!x.model && !x.powerExponent) {
      if (!rc.tiltBase) fail("bounds.gl", "needs \"model\", \"power\" or a tilted_pair family");
      x.model = rc.tiltBase;
    }
    if (const json* v = find(*g, "p_grid")) x.pGrid = numbers(*v, "bounds.gl.p_grid");
    s.gl = x;
  }
  if (const json* m = find(b, "martingale")) {
    MartingaleSection x;
    x.p = number_or(*m, "p", "bounds.martingale", x.p);
    x.norm = number_or(*m, "norm", "bounds.martingale", x.norm);
    x.d = number_or(*m, "d", "bounds.martingale", x.d);
    s.martingale = x;
  }
  if (const json* t = find(b, "tail_transform")) {
    TailSection x;
    x.q = number_or(*t, "q", "bounds.tail_transform", x.q);
    x.K = number_or(*t, "K", "bounds.tail_transform", x.K);
    x.d = number_or(*t, "d", "bounds.tail_transform", x.d);
    s.tail = x;
  }
  if (const json* k = find(b, "baum_katz")) s.baumKatzP = number_or(*k, "p", "bounds.baum_katz", 3.0);
  if (const json* o = find(b, "overlay")) {
    if (!o->is_string()) fail("bounds.overlay", "expected a path");
    s.overlay = o->get<std::string>();
  }
}

}  // namespace

RunConfig parse_config(const json& doc, const std::filesystem::path& origin) {
  if (!doc.is_object()) fail("<root>", "expected a JSON object");
  RunConfig rc;
  rc.path = origin;
  rc.raw = doc;
  auto fam = family(doc.contains("family") ? doc["family"] : json());
  rc.tiltBase = fam.tiltBase;

  const json space = doc.value("space", json::object());
  int nMax = fam.binder.max_level();
  if (const json* v = find(space, "n_max")) nMax = static_cast<int>(integer(*v, "space.n_max"));
  else if (nMax == std::numeric_limits<int>::max()) fail("space.n_max", "required for this binder");
  std::vector<Interval> box;
  if (const json* v = find(space, "box")) {
    if (!v->is_array()) fail("space.box", "expected an array of [lower, upper] pairs");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto pair = numbers((*v)[i], "space.box[" + std::to_string(i) + "]");
      if (pair.size() != 2) fail("space.box[" + std::to_string(i) + "]", "expected [lower, upper]");
      box.push_back({pair[0], pair[1]});
    }
  }
  try {
    rc.space = std::make_shared<ParamSpace>(nMax, box, fam.binder);
  } catch (const Error& e) {
    fail("space", e.what());
  }

  if (const json* t = find(doc, "theta0")) rc.theta0 = point(*t, "theta0");
  if (!rc.space->contains(rc.theta0)) fail("theta0", "outside the parameter space or wrong beta dimension");

  if (const json* e = find(doc, "experiment")) {
    rc.hasExperiment = true;
    experiment(*e, rc);
  } else {
    rc.experiment.space = rc.space;
    rc.experiment.theta0 = rc.theta0;
  }
  divergence(doc.value("divergence", json::object()), rc);
  bounds(doc.value("bounds", json::object()), rc);
  const json output = doc.value("output", json::object());
  if (const json* v = find(output, "dir")) {
    if (!v->is_string()) fail("output.dir", "expected a path");
    rc.outDir = v->get<std::string>();
  }
  if (const json* v = find(output, "svg")) rc.svg = boolean(*v, "output.svg");
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return parse_config(doc, path);
}

nlohmann::json describe(const ExperimentConfig& x) {
  json j;
  j["n_grid"] = x.nGrid;
  j["replications"] = x.replications;
  j["seed"] = x.masterSeed;
  j["confidence_level"] = x.confidenceLevel;
  j["adaptive"] = x.adaptive;
  j["max_replications"] = x.maxReplications;
  j["min_hits"] = x.minHits;
  j["workers"] = x.workers;
  j["theta0"] = to_string(x.theta0);
  return j;
}

}  // namespace mledr::cli
