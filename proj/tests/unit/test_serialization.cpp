#include <doctest.h>

#include "mledr/error.hpp"
#include "mledr/serialization.hpp"

using namespace mledr;
using nlohmann::json;

TEST_SUITE("serialization") {
  TEST_CASE("round trip of every family") {
    const auto qgParams = qg_params_from_json(json{{"alpha_neg", 0.5}, {"alpha_pos", 1.5}, {"sigma", 1.2}, {"c1", 0.3}});
    const std::vector<DensityModel> models{
        DensityModel::gaussian(1, 2),
        DensityModel::quasi_gaussian(qgParams),
        DensityModel::mixture({{0.4, 0.6}, {{qgParams}, {qgParams}}, 1}),
        DensityModel::stretched_exp(0.5, 2),
        DensityModel::power_tail(3),
        DensityModel::stable(1.5),
        DensityModel::cauchy(),
        DensityModel::tilted(DensityModel::cauchy()),
    };
    for (const auto& m : models) {
      CAPTURE(m.family_name());
      const auto j = to_json(m);
      CHECK(j["family"] == std::string(m.family_name()));
      const auto back = density_from_json(json::parse(j.dump()));
      CHECK(back == m);
      CHECK(back.density(0.3) == doctest::Approx(m.density(0.3)).epsilon(1e-14));
    }
  }

  TEST_CASE("a single constant is completed by the normalization") {
    const auto p = qg_params_from_json(json{{"c1", 1.0}});
    CHECK(p.c2 == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("malformed records name the problem") {
    CHECK_THROWS_AS(density_from_json(json{{"mean", 1}}), ConfigError);
    CHECK_THROWS_WITH_AS(density_from_json(json{{"family", "nope"}}), doctest::Contains("nope"), ConfigError);
    CHECK_THROWS_WITH_AS(density_from_json(json{{"family", "stretched_exp"}}), doctest::Contains("'r'"), ConfigError);
    CHECK_THROWS_WITH_AS(density_from_json(json{{"family", "gaussian"}, {"sd", "x"}}), doctest::Contains("'sd'"),
                         ConfigError);
    CHECK_THROWS_AS(density_from_json(json{{"family", "quasi_gaussian"}, {"c1", 3.0}}), ConfigError);
    CHECK_THROWS_AS(density_from_json(json{{"family", "quasi_gaussian"}, {"c1", 1.0}, {"c2", 2.0}}), ConfigError);
  }
}
