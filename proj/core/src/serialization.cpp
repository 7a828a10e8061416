#include "mledr/serialization.hpp"

#include <string>

#include "mledr/error.hpp"

namespace mledr {
namespace {

using nlohmann::json;

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  if (!j[key].is_number()) throw ConfigError(where + ": field '" + key + "' must be a number");
  return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

}  // namespace

json to_json(const QuasiGaussianParams& p) {
  return {{"center", p.center}, {"alpha_neg", p.exponents.alphaNeg}, {"alpha_pos", p.exponents.alphaPos},
          {"sigma", p.sigma},   {"c1", p.c1},                        {"c2", p.c2}};
}

QuasiGaussianParams qg_params_from_json(const json& j) {
  const std::string where = "quasi_gaussian";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  QuasiGaussianParams p;
  p.center = number_or(j, "center", 0.0, where);
  p.exponents.alphaNeg = number_or(j, "alpha_neg", 0.0, where);
  p.exponents.alphaPos = number_or(j, "alpha_pos", 0.0, where);
  p.sigma = number_or(j, "sigma", 1.0, where);
  const bool hasC1 = j.contains("c1"), hasC2 = j.contains("c2");
  try {
    if (hasC1 && hasC2) {
      p.c1 = number(j, "c1", where);
      p.c2 = number(j, "c2", where);
    } else if (hasC1 || hasC2) {
      // one constant given: the other follows from the normalization
      const auto side = hasC1 ? FixedSide::C1 : FixedSide::C2;
      const auto c = qg_normalize(p.exponents, p.sigma, side, number(j, hasC1 ? "c1" : "c2", where));
      p.c1 = c.c1;
      p.c2 = c.c2;
    } else {
      throw ConfigError(where + ": give c1, c2 or both");
    }
    p.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return p;
}

json to_json(const DensityModel& model) {
  json out;
  out["family"] = std::string(model.family_name());
  std::visit(
      [&out](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Gaussian>) {
          out["mean"] = f.mean;
          out["sd"] = f.sd;
        } else if constexpr (std::is_same_v<T, family::QuasiGaussian>) {
          out.update(to_json(f.params));
        } else if constexpr (std::is_same_v<T, family::Mixture>) {
          out["dim"] = f.model.dim;
          out["weights"] = f.model.weights;
          json comps = json::array();
          for (const auto& c : f.model.components) {
            json laws = json::array();
            for (const auto& p : c) laws.push_back(to_json(p));
            comps.push_back(laws);
          }
          out["components"] = comps;
        } else if constexpr (std::is_same_v<T, family::StretchedExp>) {
          out["r"] = f.r;
          out["scale"] = f.scale;
        } else if constexpr (std::is_same_v<T, family::PowerTail>) {
          out["p"] = f.p;
        } else if constexpr (std::is_same_v<T, family::Stable>) {
          out["alpha"] = f.alpha;
        } else if constexpr (std::is_same_v<T, family::Tilted>) {
          out["base"] = to_json(*f.base);
          out["tilt_constant"] = f.tiltConstant;
        }
      },
      model.family());
  return out;
}

DensityModel density_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw ConfigError("density: expected an object with a string field 'family'");
  const auto name = j["family"].get<std::string>();
  const std::string where = "density(" + name + ")";
  try {
    if (name == "gaussian") return DensityModel::gaussian(number_or(j, "mean", 0.0, where), number_or(j, "sd", 1.0, where));
    if (name == "quasi_gaussian") return DensityModel::quasi_gaussian(qg_params_from_json(j));
    if (name == "mixture") {
      MixtureModel m;
      m.dim = static_cast<std::size_t>(number_or(j, "dim", 1.0, where));
      if (!j.contains("weights") || !j["weights"].is_array()) throw ConfigError(where + ": missing array 'weights'");
      if (!j.contains("components") || !j["components"].is_array())
        throw ConfigError(where + ": missing array 'components'");
      m.weights = j["weights"].get<std::vector<double>>();
      for (const auto& c : j["components"]) {
        std::vector<QuasiGaussianParams> laws;
        if (c.is_array())
          for (const auto& law : c) laws.push_back(qg_params_from_json(law));
        else
          laws.push_back(qg_params_from_json(c));
        m.components.push_back(std::move(laws));
      }
      return DensityModel::mixture(std::move(m));
    }
    if (name == "stretched_exp") return DensityModel::stretched_exp(number(j, "r", where), number_or(j, "scale", 1.0, where));
    if (name == "power_tail") return DensityModel::power_tail(number(j, "p", where));
    if (name == "stable") return DensityModel::stable(number(j, "alpha", where));
    if (name == "cauchy") return DensityModel::cauchy();
    if (name == "tilted") {
      if (!j.contains("base")) throw ConfigError(where + ": missing field 'base'");
      const auto base = density_from_json(j["base"]);
      if (j.contains("tilt_constant")) return DensityModel::tilted(base, number(j, "tilt_constant", where));
      return DensityModel::tilted(base);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const InfeasibleError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError("density: unknown family '" + name + "'");
}

}  // namespace mledr
