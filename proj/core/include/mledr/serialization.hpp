#pragma once

// JSON records for density models: {"family": "<name>", ...numeric fields}.

#include <nlohmann/json.hpp>

#include "mledr/distributions.hpp"

namespace mledr {

nlohmann::json to_json(const DensityModel& model);

/// Throws ConfigError naming the offending field.
DensityModel density_from_json(const nlohmann::json& record);

QuasiGaussianParams qg_params_from_json(const nlohmann::json& record);
nlohmann::json to_json(const QuasiGaussianParams& params);

}  // namespace mledr
