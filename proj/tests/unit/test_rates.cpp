#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mledr/divergences.hpp"
#include "mledr/error.hpp"

using namespace mledr;

namespace {

ParamSpace gaussian_space(int nMax) { return ParamSpace(nMax, {}, FamilyBinder::gaussian_mean(1.0)); }

// N(m * beta, 1) with beta in [1, 2]
ParamSpace mean_grid_space() { return ParamSpace(1, {{1.0, 2.0}}, FamilyBinder::gaussian_mean(1.0)); }

std::vector<ParamPoint> mean_grid(int points) {
  std::vector<ParamPoint> out;
  for (int i = 0; i < points; ++i) out.push_back({1, {1.0 + i / double(points - 1)}});
  return out;
}

}  // namespace

TEST_SUITE("rates") {
  TEST_CASE("two-point gaussian: phi, nu and the theorem bound") {
    const auto space = gaussian_space(1);
    const RateFunctions r(space, {0, {}}, {{1, {}}});
    CHECK(std::isinf(r.lambda0()));
    CHECK(r.relative_entropy(0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.lower_rate() == doctest::Approx(0.125).epsilon(1e-8));
    CHECK(r.phi(0.0, 0) == 0.0);
    CHECK(r.nu(0.0) == 0.0);
    for (double l : {0.01, 0.3, 1.0, 4.0, 20.0}) {
      CHECK(r.phi(l, 0) == doctest::Approx(l * l / 2).epsilon(1e-6));
      CHECK(r.phi_bar(l, 0) == doctest::Approx(l * l / 2).epsilon(1e-6));
      CHECK(r.nu(l) == doctest::Approx(l * l / 2).epsilon(1e-6));
      CHECK(r.nu_inverse(r.nu(l)) == doctest::Approx(l).epsilon(1e-6));
    }
    CHECK(r.entropy_series_G(0.5) == 0.0);
    // G = 0, so M(u) = nu*(u) = u^2 / 2 and the bound is exp(-n / 8)
    for (long n : {1L, 8L, 64L, 400L}) {
      const auto b = r.upper_bound_Qn(n);
      CHECK(b.logRaw == doctest::Approx(-n / 8.0).epsilon(1e-3));
      CHECK(b.value <= 1.0);
    }
  }

  TEST_CASE("nu is convex and dominates every phi-bar") {
    const auto space = mean_grid_space();
    const auto grid = mean_grid(5);
    const RateFunctions r(space, {0, {1.0}}, grid);
    const auto ls = r.lambda_grid();
    for (std::size_t k = 1; k + 1 < ls.size(); ++k) {
      const double a = ls[k - 1], b = ls[k], c = ls[k + 1];
      const double chord = r.nu(a) + (r.nu(c) - r.nu(a)) * (b - a) / (c - a);
      CHECK(r.nu(b) <= chord + 1e-9 * std::max(1.0, chord));
    }
    for (double l : {0.1, 1.0, 5.0})
      for (std::size_t i = 0; i < grid.size(); ++i) CHECK(r.nu(l) >= r.phi_bar(l, i) * (1 - 1e-9));
    // the largest mean dominates: nu = 2 lambda^2
    CHECK(r.nu(1.0) == doctest::Approx(2.0).epsilon(1e-5));
  }

  TEST_CASE("gamma and the distance") {
    const auto space = mean_grid_space();
    const auto grid = mean_grid(11);
    const RateFunctions r(space, {0, {1.0}}, grid);
    for (std::size_t i : {0u, 5u, 10u}) {
      CHECK(r.gamma(0.7, i, i) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
      CHECK(r.gamma(0.0, i, 10 - i) == 0.0);
      CHECK(r.theta_distance(i, i) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    }
    // gaussian means differing by D: gamma = lambda^2 D^2 / 2 regardless of theta0
    const double D = grid[10].beta[0] - grid[0].beta[0];
    for (double l : {0.2, 1.0, 3.0}) CHECK(r.gamma(l, 0, 10) == doctest::Approx(l * l * D * D / 2).epsilon(1e-6));
    // nu = 2 lambda^2, gamma-bar = lambda^2 D^2 / 2 -> d = D / 2
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double d = r.theta_distance(i, j);
        CHECK(d >= 0.0);
        CHECK(d == doctest::Approx(std::abs(grid[i].beta[0] - grid[j].beta[0]) / 2).epsilon(1e-4).scale(1.0));
        // defining domination at every grid lambda
        for (double l : r.lambda_grid()) CHECK(r.gamma_bar(l, i, j) <= r.nu(l * d) * (1 + 1e-6) + 1e-12);
      }
    CHECK_FALSE(r.nu_range_exceeded());
  }

  TEST_CASE("theorem bound on an interval of means") {
    const auto space = mean_grid_space();
    const RateFunctions r(space, {0, {1.0}}, mean_grid(11));
    CHECK(r.min_relative_entropy() == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(r.entropy_series_G(0.3) > 0.0);
    double previous = 2.0;
    for (long n : {1L, 4L, 16L, 64L, 256L, 1024L}) {
      const auto b = r.upper_bound_Qn(n);
      CHECK(b.value <= 1.0);
      CHECK(b.value <= previous);
      CHECK(b.clamped == !(b.logRaw < 0.0));
      previous = b.value;
    }
    CHECK(r.upper_bound_Qn(1024).value < 1e-10);
    CHECK(std::isfinite(r.M_literal(1.0)));
    std::ostringstream nu, g, m;
    r.write_nu_csv(nu);
    r.write_G_csv(g);
    const double u[] = {0.5, 1.0};
    r.write_M_csv(m, u);
    CHECK(nu.str().rfind("argument,value,error\n", 0) == 0);
    CHECK(m.str().find('\n') != std::string::npos);
  }

  TEST_CASE("zero relative entropy is rejected") {
    const auto n = DensityModel::gaussian();
    ParamSpace flat(1, {}, FamilyBinder::fixed({n, n}));
    const RateFunctions r(flat, {0, {}}, {{1, {}}});
    CHECK(r.min_relative_entropy() == 0.0);
    CHECK_THROWS_AS(r.M(1.0), DomainError);
    CHECK_THROWS_AS(r.upper_bound_Qn(10), DomainError);
  }
}
