#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mledr/error.hpp"
#include "mledr/estimation.hpp"

using namespace mledr;

namespace {

ParamSpace two_point() { return ParamSpace(1, {}, FamilyBinder::gaussian_mean(1.0)); }

// N(beta, 1) against N(beta, 2): identifiable location family with a nuisance mean
ParamSpace location_space() {
  return ParamSpace(1, {{-3.0, 3.0}},
                    FamilyBinder::location({DensityModel::gaussian(0, 1), DensityModel::gaussian(0, 2)}));
}

std::vector<double> sample_with_mean(double mean, std::size_t n, double spread = 0.3) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = mean + spread * ((i % 2) ? 1.0 : -1.0) * double(i / 2 + 1);
  if (n % 2) xs.back() = mean;
  return xs;
}

double mean(const std::vector<double>& xs) { return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size(); }

}  // namespace

TEST_SUITE("estimation") {
  TEST_CASE("contrast") {
    const auto s = two_point();
    const ParamPoint t0{0, {}}, t1{1, {}};
    const std::vector<double> xs{0.1, -2.0, 3.5};
    CHECK(contrast(xs, t0, t0, s) == 0.0);
    const double half[] = {0.5};
    CHECK(std::abs(contrast(half, t1, t0, s)) < 1e-15);
    const std::vector<double> copies(7, 1.3);
    const double one[] = {1.3};
    CHECK(contrast(copies, t1, t0, s) == doctest::Approx(7 * contrast(one, t1, t0, s)).epsilon(1e-13));
    CHECK(std::abs(contrast(xs, t1, t0, s) + contrast(xs, t0, t1, s)) < 1e-12);
    // sum (x - 1/2)
    CHECK(contrast(xs, t1, t0, s) == doctest::Approx(0.1 - 2.0 + 3.5 - 1.5).epsilon(1e-13));
  }

  TEST_CASE("a vanishing density is reported with its index") {
    QuasiGaussianParams q{0.0, {1.0, 1.0}, 1.0, 0.0, 0.0};
    const auto c = qg_normalize(q.exponents, 1.0, FixedSide::C1, 1.0);
    q.c1 = c.c1, q.c2 = c.c2;
    ParamSpace s(1, {}, FamilyBinder::fixed({DensityModel::gaussian(), DensityModel::quasi_gaussian(q)}));
    const std::vector<double> xs{0.4, -1.0, 0.0, 2.0};
    try {
      contrast(xs, {1, {}}, {0, {}}, s);
      FAIL("expected DensityZeroError");
    } catch (const DensityZeroError& e) {
      CHECK(e.index() == 2);
    }
  }

  TEST_CASE("profile maximization") {
    const auto s = location_space();
    auto xs = sample_with_mean(1.2, 40);
    const auto p = profile_mle_continuous(xs, 0, s, {0, {0.0}});
    REQUIRE(p.betaHat.size() == 1);
    CHECK(std::abs(p.betaHat[0] - mean(xs)) < 1e-4);
    CHECK_FALSE(p.tieFlag);
    CHECK_FALSE(p.boundaryFlag);
    // maximum outside the box ends on the boundary
    const auto far = sample_with_mean(5.0, 20);
    const auto q = profile_mle_continuous(far, 0, s, {0, {0.0}});
    CHECK(q.betaHat[0] == doctest::Approx(3.0));
    CHECK(q.boundaryFlag);
    // no nuisance parameter
    const auto r = profile_mle_continuous(xs, 1, two_point(), {0, {}});
    CHECK(r.betaHat.empty());
    // beta does not enter: constant likelihood, first grid point, tie flag
    ParamSpace flat(1, {{0.0, 1.0}}, FamilyBinder::fixed({DensityModel::gaussian(), DensityModel::gaussian(1, 1)}));
    const auto t = profile_mle_continuous(xs, 1, flat, {0, {0.5}});
    CHECK(t.tieFlag);
    CHECK(t.betaHat[0] == 0.0);
  }

  TEST_CASE("threshold rule of the two-point family") {
    const auto s = two_point();
    const auto hi = sample_with_mean(0.6, 10), lo = sample_with_mean(0.4, 10);
    CHECK(mle(hi, s, {0, {}}).tauHat == 1);
    CHECK(mle(lo, s, {0, {}}).tauHat == 0);
    const std::vector<double> tie(10, 0.5);
    const auto r = mle(tie, s, {0, {}});
    CHECK(r.tauHat == 0);
    CHECK(r.tieFlag);
  }

  TEST_CASE("mle result is consistent with the contrast") {
    const auto s = location_space();
    RandomStream rng(17, 0, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const auto xs = DensityModel::gaussian(0.3, trial % 2 ? 1.0 : 2.0).sample(rng, 30);
      const auto r = mle(xs, s, {0, {0.0}});
      CHECK(r.logLik == doctest::Approx(contrast(xs, {r.tauHat, r.betaHat}, {0, {0.0}}, s)).epsilon(1e-9).scale(1.0));
      for (const auto& p : r.profile) CHECK(r.logLik >= p.value - 1e-12);
      const auto again = mle(xs, s, {0, {0.0}});
      CHECK(again.betaHat == r.betaHat);
    }
  }

  TEST_CASE("a theta-free factor does not change the estimate") {
    auto plain = location_space();
    auto weighted = location_space();
    weighted.set_reference_log_density([](double x) { return std::sin(x) - 0.1 * x * x; });
    RandomStream rng(23, 0, 0);
    for (int trial = 0; trial < 10; ++trial) {
      const auto xs = DensityModel::gaussian(-0.5, 1.5).sample(rng, 25);
      const auto a = mle(xs, plain, {0, {0.0}}), b = mle(xs, weighted, {0, {0.0}});
      CHECK(a.tauHat == b.tauHat);
      // equal up to the optimizer tolerance; the factor only shifts rounding
      REQUIRE(a.betaHat.size() == b.betaHat.size());
      CHECK(a.betaHat[0] == doctest::Approx(b.betaHat[0]).epsilon(1e-6));
    }
  }

  TEST_CASE("prepared classifier agrees with mle") {
    const auto c = DensityModel::stretched_exp(0.5);
    ParamSpace pair(1, {}, FamilyBinder::fixed({c, DensityModel::tilted(c)}));
    const PreparedClassifier fast(pair, {0, {}});
    RandomStream rng(29, 0, 0);
    for (int trial = 0; trial < 200; ++trial) {
      const auto xs = c.sample(rng, 8);
      CHECK(fast.misclassified(xs) == (mle(xs, pair, {0, {}}).tauHat >= 1));
    }
  }

  TEST_CASE("stationarity residual") {
    const auto s = location_space();
    const auto xs = sample_with_mean(0.7, 30);
    const double m = mean(xs);
    CHECK(stationarity_residual(xs, {0, {m}}, s, {0, {0.0}}) < 1e-4);
    CHECK(stationarity_residual(xs, {0, {m + 0.1}}, s, {0, {0.0}}) > 0.01);
    ParamSpace flat(1, {{0.0, 1.0}}, FamilyBinder::fixed({DensityModel::gaussian(), DensityModel::gaussian(1, 1)}));
    CHECK(stationarity_residual(xs, {1, {0.5}}, flat, {0, {0.5}}) == 0.0);
    CHECK_THROWS_AS(stationarity_residual(xs, {0, {3.0}}, s, {0, {0.0}}), DomainError);
  }

  TEST_CASE("expected contrast") {
    const auto s = two_point();
    CHECK(expected_contrast_a({0, {}}, {0, {}}, s) == 0.0);
    CHECK(expected_contrast_a({1, {}}, {0, {}}, s) == doctest::Approx(-0.5).epsilon(1e-9));
    const auto l = location_space();
    for (double b : {-1.0, 0.0, 2.0}) CHECK(expected_contrast_a({1, {b}}, {0, {0.0}}, l) < 0.0);
  }

  TEST_CASE("csv row and identifiability") {
    MleResult r;
    r.tauHat = 1;
    r.betaHat = {0.25};
    r.logLik = 2.5;
    r.tieFlag = false;
    CHECK(to_csv_row(r) == "1,0.25,2.5,0");
    CHECK(identifiable(location_space()));
    ParamSpace shift(1, {{-1.0, 1.0}}, FamilyBinder::location({DensityModel::gaussian(0, 1), DensityModel::gaussian(1, 1)}));
    CHECK_FALSE(identifiable(shift));
  }
}
