#include <doctest.h>

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "helpers.hpp"
#include "mledr/bounds.hpp"
#include "mledr/error.hpp"

using namespace mledr;

TEST_SUITE("bounds") {
  TEST_CASE("rosenthal bound") {
    const double p = 2.5, m = 1.3, d = 0.4;
    for (long n : {10L, 1000L, 100000L}) {
      const auto b = rosenthal_bound(p, m, d, n);
      const double direct =
          std::pow(kRosenthalConstant * m * p / (d * std::log(p)), p) / std::pow(double(n), p / 2);
      CHECK(b.raw == doctest::Approx(direct).epsilon(1e-12));
      CHECK(b.value == doctest::Approx(std::min(1.0, direct)).epsilon(1e-12));
    }
    // n^(-p/2) scaling
    const double r = rosenthal_bound(p, m, d, 1000000).raw / rosenthal_bound(p, m, d, 10000).raw;
    CHECK(r == doctest::Approx(std::pow(100.0, -p / 2)).epsilon(1e-12));
    CHECK(rosenthal_bound(p, m, d, 1).clamped);
    CHECK_THROWS_AS(rosenthal_bound(2.0, m, d, 10), DomainError);
    CHECK_THROWS_AS(rosenthal_bound(p, -1.0, d, 10), DomainError);
    CHECK_THROWS_AS(rosenthal_bound(p, m, 0.0, 10), DomainError);
    CHECK_THROWS_AS(rosenthal_bound(p, m, d, 0), DomainError);
  }

  TEST_CASE("absolute moments") {
    const auto g = DensityModel::gaussian();
    // E|Z|^p = 2^(p/2) Gamma((p+1)/2) / sqrt(pi)
    for (double p : {1.0, 2.0, 3.5, 8.0}) {
      const double exact = (p / 2) * std::log(2.0) + std::lgamma((p + 1) / 2) - 0.5 * std::log(M_PI);
      CHECK(log_abs_moment(g, p) == doctest::Approx(exact).epsilon(1e-9));
    }
    CHECK(log_abs_moment(DensityModel::gaussian(3, 1), 2.0, 3.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(std::isinf(log_abs_moment(DensityModel::cauchy(), 1.0)));
    CHECK(std::isfinite(log_abs_moment(DensityModel::cauchy(), 0.5)));
  }

  TEST_CASE("natural psi") {
    const auto g = gl_natural_psi(DensityModel::gaussian(), linear_grid(2, 12, 41));
    CHECK(g.provenance == PsiProvenance::NaturalFromMoments);
    CHECK(g.psi(2.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(g.psi(4.0) == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-6));
    CHECK(g.log_convex(1e-6));
    // moments of order >= 3 diverge
    const auto t = gl_natural_psi(DensityModel::power_tail(3), linear_grid(2, 5, 31));
    CHECK(t.b == doctest::Approx(3.0).epsilon(0.01));
    CHECK(t.b <= 3.1);
  }

  TEST_CASE("grand-lebesgue bound") {
    const auto psi = PsiFunction::analytic([](double p) { return p; }, 2.0, std::numeric_limits<double>::infinity());
    CHECK(psi.log_convex());
    double previous = 2.0;
    for (long n : {1L, 10L, 100L, 10000L, 1000000L}) {
      const auto b = gl_bound(psi, 1.0, n);
      CHECK(b.value > 0.0);
      CHECK(b.value <= 1.0);
      CHECK(b.value <= previous);
      previous = b.value;
    }
    // brute force sup over a fine p-grid
    const long n = 10000;
    const double z = std::log(std::sqrt(double(n)));
    double best = -std::numeric_limits<double>::infinity();
    for (double p = 2.0 * (1 + 1e-9); p < 1000.0; p *= 1.0005) {
      const double psi2 = p * std::log(kRosenthalConstant * p * p / std::log(p));
      best = std::max(best, p * z - psi2);
    }
    CHECK(-std::log(gl_bound(psi, 1.0, n).raw) == doctest::Approx(best).epsilon(1e-3));
    CHECK_THROWS_AS(PsiFunction::analytic([](double p) { return p; }, 1.0, 3.0), DomainError);
  }

  TEST_CASE("martingale moment bound") {
    const std::vector<double> norms(50, 1.5);
    const double p = 3, d = 0.5;
    const auto b = martingale_moment_bound(p, norms, d, 50);
    const double direct = std::pow(d, -p) * std::pow(p - 1, p) * std::pow(50.0, -p / 2) * std::pow(1.5, p);
    CHECK(b.raw == doctest::Approx(direct).epsilon(1e-12));
    CHECK_THROWS_AS(martingale_moment_bound(1.5, norms, d, 50), DomainError);
    CHECK_THROWS_AS(martingale_moment_bound(p, norms, d, 49), DomainError);
    // dominates a simulated tail of a +-1 random walk
    RandomStream rng(11, 0, 0);
    const int n = 50, reps = 20000;
    const double level = 0.6;
    int hits = 0;
    for (int r = 0; r < reps; ++r) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += rng.uniform() < 0.5 ? -1.0 : 1.0;
      hits += std::abs(s / n) > level;
    }
    const std::vector<double> ones(n, 1.0);
    CHECK(double(hits) / reps <= martingale_moment_bound(4.0, ones, level, n).value);
  }

  TEST_CASE("tail transform") {
    for (double q : {1.0, 2.0}) {
      const auto T = TailFunction::weibull(q, 1.0);
      CHECK(T(0.5) == doctest::Approx(std::exp(-std::pow(0.5, q))));
      double previous = 2.0;
      std::vector<double> xs, ys;
      // W[T](sqrt(n)) against n
      for (double n = 4.0; n <= 1 << 24; n *= 4) {
        const auto w = tail_transform_W(T, std::sqrt(n));
        CHECK(w.value <= 1.0);
        CHECK(w.value <= previous + 1e-15);
        previous = w.value;
        if (n >= 1 << 12) {
          xs.push_back(std::log(n));
          ys.push_back(std::log(-w.logRaw));
        }
      }
      // ln W ~ -n^(q / (q + 2))
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / xs.size(), my += ys[i] / xs.size();
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
      CAPTURE(q);
      CHECK(std::abs(sxy / sxx - q / (q + 2)) < 0.1);
    }
    TailFunction rising{[](double x) { return std::min(0.0, x - 5.0); }};
    CHECK_THROWS_AS(tail_transform_W(rising, 1.0), DomainError);
  }

  TEST_CASE("baum-katz shape") {
    CHECK(baum_katz_shape(3.0, 10) == doctest::Approx(0.1));
    CHECK(baum_katz_shape(2.0, 10) == 1.0);
  }

  TEST_CASE("tilted pair constants") {
    // gaussian base: E|Z| = sqrt(2/pi)
    const auto c = tilted_pair_constants(DensityModel::gaussian(), 3.0);
    CHECK(c.meanAbs == doctest::Approx(std::sqrt(2 / M_PI)).epsilon(1e-8));
    const double C = 1.0 / (2 * std::exp(0.5) * (1 - testutil::normal_cdf(1.0)));
    CHECK(c.logTilt == doctest::Approx(std::log(C)).epsilon(1e-8));
    CHECK(c.gap == doctest::Approx(c.meanAbs - c.logTilt).epsilon(1e-12));
    CHECK(c.gap > 0.0);
    boost::math::quadrature::exp_sinh<double> es;
    boost::math::quadrature::tanh_sinh<double> ts;
    const double a = c.meanAbs;
    auto cube = [a](double x) { return std::pow(std::abs(x - a), 3) * testutil::normal_pdf(x); };
    const double m3 = 2 * (ts.integrate(cube, 0.0, a) + es.integrate([&](double t) { return t > 40 ? 0.0 : cube(a + t); }));
    CHECK(c.momentNorm == doctest::Approx(std::cbrt(m3)).epsilon(1e-6));
  }

  TEST_CASE("bounds csv") {
    std::ostringstream out;
    write_bounds_csv(out, {{"rosenthal", 10, rosenthal_bound(2.5, 1, 1, 10)}});
    CHECK(out.str().rfind("bound,n,boundValue,clampedFlag\nrosenthal,10,", 0) == 0);
  }
}
