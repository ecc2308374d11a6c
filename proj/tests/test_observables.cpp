#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hlpt/observables.hpp"
#include "hlpt/rng.hpp"

using namespace hlpt;

TEST_CASE("classify_regime GUE constants at b=0.5, nu=4, rho=1") {
  const ScalingConstants c = classify_regime(4.0, 0.5, 1.0);
  CHECK(c.regime == Regime::GUE);
  CHECK(*c.m_nu == doctest::Approx(0.34314575050762).epsilon(1e-10));
  CHECK(*c.sigma_nu == doctest::Approx(0.6237174228020278).epsilon(1e-10));
  CHECK(*c.varrho == doctest::Approx(0.20710678118654757).epsilon(1e-10));
  CHECK(!c.m_tilde);
  CHECK(!c.sigma_tilde);  // not-applicable, never NaN
}

TEST_CASE("classify_regime critical equality lands on GOE2") {
  const double rho_c = 1.0 - std::pow(4.0 * 0.5, -0.5);
  CHECK(classify_regime(4.0, 0.5, rho_c).regime == Regime::GOE2);
  CHECK(classify_regime(4.0, 0.5, rho_c + 1e-6).regime == Regime::GUE);
  CHECK(classify_regime(4.0, 0.5, rho_c - 1e-6).regime == Regime::Gaussian);
  // explicit override for exact user-supplied criticality
  CHECK(classify_regime(4.0, 0.5, 0.2929, Regime::GOE2).regime == Regime::GOE2);
}

TEST_CASE("classify_regime Gaussian constants at rho=0.2") {
  const ScalingConstants c = classify_regime(4.0, 0.5, 0.2);
  CHECK(c.regime == Regime::Gaussian);
  CHECK(c.alpha == doctest::Approx(4.0));
  CHECK(*c.m_tilde == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(*c.sigma_tilde == doctest::Approx(0.3741657386773943).epsilon(1e-10));
}

TEST_CASE("subcritical fan below nu_0") {
  const ScalingConstants c = classify_regime(1.5, 0.5, 1.0);
  CHECK(c.regime == Regime::SubcriticalFan);
  CHECK(!c.m_nu);
  CHECK(limit_shape(1.5, 0.5) == 0.0);
  CHECK(limit_shape(2.0, 0.5) == 0.0);  // nu = nu_0 exactly
}

TEST_CASE("limit shape value and asymptote") {
  CHECK(limit_shape(4.0, 0.5) ==
        doctest::Approx(0.34314575050762).epsilon(1e-12));
  // phi(nu)/nu -> 1 deep in the occupied region
  CHECK(limit_shape(1e8, 0.5) / 1e8 == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("kpz quantities and the sigma consistency identity") {
  const double b = 0.5;
  const double rho = 1.0 - std::pow(4.0 * (1.0 - b), -0.5);  // y = 4
  const KpzQuantities q = kpz_quantities(rho, b);
  CHECK(q.j_rho == doctest::Approx(0.8284271247461903).epsilon(1e-12));
  CHECK(kpz_quantities(0.5, b).a_rho == doctest::Approx(0.25));
  const ScalingConstants c = classify_regime(4.0, b, 1.0);
  CHECK(std::abs(q.sigma_check - *c.sigma_nu) < 1e-12);
}

TEST_CASE("sigma consistency across a 20x20 parameter grid") {
  // sigma_nu from classify_regime equals (-lambda A^2/2)^{1/3} whenever
  // nu(1-b) > 1.
  for (int i = 1; i <= 20; ++i) {
    const double b = i / 21.0;
    for (int j = 1; j <= 20; ++j) {
      const double nu = (1.0 + j) / (1.0 - b);  // nu(1-b) = 1+j > 1
      const double rho = 1.0 - std::pow(nu * (1.0 - b), -0.5);
      const ScalingConstants c = classify_regime(nu, b, 1.0);
      const KpzQuantities q = kpz_quantities(rho, b);
      REQUIRE(std::abs(q.sigma_check - *c.sigma_nu) < 1e-12);
    }
  }
}

TEST_CASE("continuity of the centering across the critical line") {
  // m_tilde -> m_nu as rho -> rho_c from below.
  const double b = 0.37, nu = 6.1;
  const double rho_c = 1.0 - std::pow(nu * (1.0 - b), -0.5);
  const ScalingConstants gue = classify_regime(nu, b, 1.0);
  const ScalingConstants gauss = classify_regime(nu, b, rho_c - 1e-9);
  CHECK(std::abs(*gauss.m_tilde - *gue.m_nu) < 1e-6);
  const ScalingConstants closer = classify_regime(nu, b, rho_c - 1e-11);
  CHECK(std::abs(*closer.m_tilde - *gue.m_nu) < 1e-8);
}

TEST_CASE("regime partition is exhaustive and exclusive") {
  const double b = 0.5, nu = 4.0;
  for (double rho = 0.01; rho <= 1.0; rho += 0.0097) {
    const Regime r = classify_regime(nu, b, rho).regime;
    const double rho_c = 1.0 - std::pow(nu * (1.0 - b), -0.5);
    if (std::abs(rho - rho_c) <= 1e-12) {
      CHECK(r == Regime::GOE2);
    } else if (rho > rho_c) {
      CHECK(r == Regime::GUE);
    } else {
      CHECK(r == Regime::Gaussian);
    }
  }
}

TEST_CASE("rescale_fluctuations centering and affine law") {
  const ScalingConstants c = classify_regime(4.0, 0.5, 1.0);
  const double t = 2000.0;
  const long long n_exact = static_cast<long long>(*c.m_nu * t);
  const double at_center = rescale_fluctuations({{t, n_exact}}, c)[0];
  CHECK(std::abs(at_center) < 1.0 / (*c.sigma_nu * std::cbrt(t)));

  // affine: adding sigma t^{1/3} particles lowers the statistic by one
  const double shift = *c.sigma_nu * std::cbrt(t);
  const long long ishift = static_cast<long long>(std::llround(shift));
  const auto v =
      rescale_fluctuations({{t, n_exact}, {t, n_exact + ishift}}, c);
  CHECK(v[0] - v[1] ==
        doctest::Approx(static_cast<double>(ishift) / shift).epsilon(1e-12));
}

TEST_CASE("rescale uses the t^{1/2} scaling in the Gaussian regime") {
  const ScalingConstants c = classify_regime(4.0, 0.5, 0.2);
  const double t = 400.0;
  const auto v = rescale_fluctuations({{t, 100}}, c);
  CHECK(v[0] == doctest::Approx((0.3 * t - 100.0) /
                                (*c.sigma_tilde * std::sqrt(t))));
}

TEST_CASE("ks_distance basics") {
  // single sample at the median
  CHECK(ks_distance({0.0}, [](double s) { return normal_cdf(s); }) ==
        doctest::Approx(0.5));
  // samples from the cdf itself: KS <= 1.63/sqrt(n) whp
  const int n = 10000;
  std::vector<double> samples;
  samples.reserve(n);
  Rng rng(101);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    double lo = -9.0, hi = 9.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (normal_cdf(mid) < u ? lo : hi) = mid;
    }
    samples.push_back(0.5 * (lo + hi));
  }
  const double ks =
      ks_distance(samples, [](double s) { return normal_cdf(s); });
  CHECK(ks <= 1.63 / std::sqrt(static_cast<double>(n)));

  // constant shifts only increase the distance for a unimodal cdf
  double prev = ks;
  for (double shift : {0.05, 0.1, 0.2, 0.4}) {
    std::vector<double> shifted = samples;
    for (double& s : shifted) s += shift;
    const double d =
        ks_distance(shifted, [](double s) { return normal_cdf(s); });
    CHECK(d >= prev);
    prev = d;
  }
}

TEST_CASE("normal cdf reference values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normal_cdf(2.0) == doctest::Approx(0.9772498680518208).epsilon(1e-12));
  CHECK(normal_cdf(-2.0) ==
        doctest::Approx(1.0 - 0.9772498680518208).epsilon(1e-10));
}

TEST_CASE("rescale rejects the fan") {
  const ScalingConstants fan = classify_regime(1.0, 0.5, 1.0);
  CHECK_THROWS_AS(rescale_fluctuations({{1.0, 1}}, fan), std::invalid_argument);
}

#include "hlpt/particle_system.hpp"

TEST_CASE("height/position event identity on simulated snapshots") {
  // {N_y(t) >= m} and {x_m(t) <= y} are the same event, checked
  // exhaustively on evolving configurations.
  Rng rng(911);
  Configuration c;
  c.positions = {0, 1, 2, 5, 9, 14};
  for (int snap = 0; snap < 40; ++snap) {
    run_until(c, 0.45, c.time + 0.5, rng);
    const long long n = static_cast<long long>(c.positions.size());
    for (long long y = -1; y <= c.positions.back() + 2; ++y) {
      const long long h = height(c, y);
      for (long long m = 1; m <= n; ++m) {
        const bool height_event = h >= m;
        const bool position_event =
            c.positions[static_cast<std::size_t>(m - 1)] <= y;
        REQUIRE(height_event == position_event);
      }
    }
  }
}
