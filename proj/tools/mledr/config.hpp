#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mledr/distributions.hpp"
#include "mledr/montecarlo.hpp"
#include "mledr/param_space.hpp"

namespace mledr::cli {

struct DivergenceSection {
  std::vector<ParamPoint> theta1;
  std::vector<double> lambdaGrid{0.25, 0.5, 0.75};
  bool rates = false;
  std::vector<double> mUGrid;
  std::vector<long> mgfNGrid;
  std::vector<double> mgfLambdaGrid{0.25, 0.5, 1.0};
  long mgfReplications = 20000;
};

struct RosenthalSection {
  double p = 3.0;
  double momentNorm = 1.0;
  double d = 1.0;
};

struct GlSection {
  std::optional<DensityModel> model;  // natural psi of this model
  std::optional<double> powerExponent;  // analytic psi(p) = p^k
  std::vector<double> pGrid;
  double d = 1.0;
};

struct MartingaleSection {
  double p = 2.0;
  double norm = 1.0;
  double d = 1.0;
};

struct TailSection {
  double q = 1.0;
  double K = 1.0;
  double d = 1.0;
};

struct BoundsSection {
  std::vector<long> nGrid;
  bool theorem = false;
  bool lowerPrediction = false;
  std::optional<RosenthalSection> rosenthal;
  std::optional<GlSection> gl;
  std::optional<MartingaleSection> martingale;
  std::optional<TailSection> tail;
  std::optional<double> baumKatzP;
  std::optional<std::filesystem::path> overlay;
};

struct RunConfig {
  std::filesystem::path path;
  nlohmann::json raw;
  std::shared_ptr<ParamSpace> space;
  ParamPoint theta0;
  /// Base density when the family is a tilted pair.
  std::optional<DensityModel> tiltBase;
  ExperimentConfig experiment;
  bool hasExperiment = false;
  std::optional<double> wnU;
  DivergenceSection divergence;
  BoundsSection bounds;
  std::filesystem::path outDir = "mledr_out";
  bool svg = false;
};

/// Reads and validates a JSON config; every failure is a ConfigError whose
/// message starts with the offending field path.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const nlohmann::json& document, const std::filesystem::path& origin = {});

/// The experiment section as resolved (seed, workers and grids after overrides).
nlohmann::json describe(const ExperimentConfig& experiment);

}  // namespace mledr::cli
