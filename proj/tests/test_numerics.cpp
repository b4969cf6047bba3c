#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "smoothcert/numerics.hpp"
#include "smoothcert/rng.hpp"

using namespace smoothcert;

TEST_CASE("ln_gamma reference values") {
  CHECK(ln_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ln_gamma(0.5) == doctest::Approx(0.57236494292470009).epsilon(1e-13));
  CHECK(ln_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-13));
  CHECK_THROWS_AS(ln_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(ln_gamma(-1.0), std::domain_error);
  CHECK_THROWS_AS(ln_gamma(std::nan("")), std::domain_error);
}

TEST_CASE("ln_gamma across the domain") {
  CHECK(std::fabs(ln_gamma(0.001) - 6.9071788853838537) < 1e-12);
  CHECK(std::fabs(ln_gamma(123.456) - 469.60554712992947) < 1e-10);
  // At x = 1e6 the value itself is ~1.3e7, so 1 ulp is ~2e-9.
  CHECK(std::fabs(ln_gamma(1e6) - 12815504.569147612) < 1e-7);
}

TEST_CASE("Tolerance validation") {
  Tolerance bad_abs{-1.0, 1e-9, 100};
  Tolerance bad_rel{1e-9, 0.0, 100};
  Tolerance bad_iter{1e-9, 1e-9, 0};
  CHECK_THROWS_AS(bad_abs.validate(), std::domain_error);
  CHECK_THROWS_AS(bad_rel.validate(), std::domain_error);
  CHECK_THROWS_AS(bad_iter.validate(), std::domain_error);
}

TEST_CASE("ln_gamma recurrence on a grid") {
  for (double x = 0.1; x <= 10.0; x += 0.1) {
    CHECK(std::fabs(ln_gamma(x + 1.0) - ln_gamma(x) - std::log(x)) < 1e-10);
  }
}

TEST_CASE("normal CDF") {
  CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::fabs(std_normal_cdf(1.96) - 0.97500210485177957) < 1e-12);
  CHECK(std::fabs(std_normal_cdf(-1.3) - (1.0 - std_normal_cdf(1.3))) < 1e-14);
  CHECK_THROWS_AS(std_normal_cdf(std::nan("")), std::domain_error);
}

TEST_CASE("normal quantile") {
  CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::fabs(std_normal_quantile(0.9) - 1.2815515655446004) < 1e-9);
  CHECK(std::fabs(std_normal_quantile(0.975) - 1.959963984540054) < 1e-9);
  CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
}

TEST_CASE("CDF and quantile are inverse") {
  for (double q = 1e-9; q < 1.0; q = q < 0.1 ? q * 10.0 : q + 0.1) {
    CHECK(std::fabs(std_normal_cdf(std_normal_quantile(q)) - q) < 1e-8);
  }
  CHECK(std::fabs(std_normal_cdf(std_normal_quantile(1.0 - 1e-9)) - (1.0 - 1e-9)) < 1e-8);
}

TEST_CASE("bisect_root") {
  Tolerance tol{1e-12, 1e-12, 200};
  CHECK(bisect_root([](double x) { return x - 2.0; }, 0.0, 5.0, tol) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(bisect_root([](double x) { return x * x * x - 8.0; }, 0.0, 5.0, tol) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(bisect_root([](double x) { return std_normal_cdf(x) - 0.9; }, 0.0, 10.0, tol) ==
        doctest::Approx(1.2815515655).epsilon(1e-8));
  CHECK_THROWS_AS(bisect_root([](double x) { return x + 10.0; }, 0.0, 5.0, tol),
                  std::invalid_argument);
  Tolerance tight{1e-18, 1e-18, 4};
  CHECK_THROWS_AS(bisect_root([](double x) { return x - 2.0; }, 0.0, 5.0, tight),
                  std::runtime_error);
}

TEST_CASE("maximize_1d on unimodal functions") {
  Tolerance tol{1e-10, 1e-12, 300};
  auto [x1, v1] = maximize_1d([](double x) { return -(x - 1.0) * (x - 1.0); }, 0.0, 3.0, tol);
  CHECK(x1 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(v1 == doctest::Approx(0.0).epsilon(1e-10));
  auto [x2, v2] = maximize_1d([](double x) { return std::sin(x); }, 0.0, M_PI, tol);
  CHECK(x2 == doctest::Approx(M_PI / 2).epsilon(1e-6));
  CHECK(v2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(maximize_1d([](double x) { return x; }, 1.0, 1.0, tol),
                  std::domain_error);
}

TEST_CASE("maximize_1d finds the Lecuyer beta supremum") {
  // Reference by dense grid scan at step 1e-4 (independent of the search).
  const double p1 = 0.9, p2 = 0.1, sigma = 1.0;
  auto objective = [&](double beta) {
    double denom = p1 - std::exp(2.0 * beta) * p2;
    if (denom <= 0.0) return -1.0;
    return sigma * beta / std::sqrt(2.0 * std::log(1.25 * (1.0 + std::exp(beta)) / denom));
  };
  double grid_best = 0.0;
  for (double b = 1e-4; b <= 1.0; b += 1e-4) grid_best = std::max(grid_best, objective(b));
  CHECK(grid_best == doctest::Approx(0.390).epsilon(2e-3));
  auto [arg, found] = maximize_1d(objective, 1e-9, 1.0, Tolerance{1e-12, 1e-12, 300});
  (void)arg;
  CHECK(found >= grid_best - 1e-6);
  CHECK(found == doctest::Approx(grid_best).epsilon(1e-4));
}

TEST_CASE("clopper_pearson_lower closed forms and reference value") {
  CHECK(clopper_pearson_lower(0, 100, 0.001) == 0.0);
  CHECK(clopper_pearson_lower(100, 100, 0.001) ==
        doctest::Approx(std::pow(0.001, 0.01)).epsilon(1e-12));
  CHECK(std::fabs(clopper_pearson_lower(100, 100, 0.001) - 0.93325430079699) < 1e-9);
  // Independent oracle: direct tail sum with exact binomial coefficients.
  auto tail10 = [](double pr) {
    const double c[] = {252, 210, 120, 45, 10, 1};  // C(10, 5..10)
    double s = 0.0;
    for (int k = 5; k <= 10; ++k)
      s += c[k - 5] * std::pow(pr, k) * std::pow(1.0 - pr, 10 - k);
    return s;
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    (tail10(mid) < 0.05 ? lo : hi) = mid;
  }
  CHECK(std::fabs(clopper_pearson_lower(5, 10, 0.05) - 0.5 * (lo + hi)) < 1e-9);
  CHECK(std::fabs(clopper_pearson_lower(5, 10, 0.05) - 0.22244110100813) < 1e-8);
  CHECK_THROWS_AS(clopper_pearson_lower(5, 10, 0.0), std::domain_error);
  CHECK_THROWS_AS(clopper_pearson_lower(11, 10, 0.05), std::domain_error);
}

TEST_CASE("clopper_pearson_lower monotonicity") {
  double prev = -1.0;
  for (long long k = 0; k <= 100; k += 10) {
    double v = clopper_pearson_lower(k, 100, 0.01);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(clopper_pearson_lower(80, 100, 0.001) <= clopper_pearson_lower(80, 100, 0.01));
  CHECK(clopper_pearson_lower(80, 100, 0.01) <= clopper_pearson_lower(80, 100, 0.1));
}

TEST_CASE("clopper_pearson_lower large-sample case") {
  // 99,000 hits of 100,000 at gamma = 0.001.
  double v = clopper_pearson_lower(99000, 100000, 0.001);
  CHECK(v == doctest::Approx(0.98898934).epsilon(1e-6));
}

TEST_CASE("hoeffding_confidence") {
  CHECK(hoeffding_confidence(2, 100000, 0.1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(hoeffding_confidence(10, 1000, 0.05) - (1.0 - 10.0 * std::exp(-5.0))) <
        1e-12);
  CHECK(hoeffding_confidence(2, 1, 10.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hoeffding_confidence(100, 1, 1e-6) == 0.0);  // clamped
  CHECK_THROWS_AS(hoeffding_confidence(1, 10, 0.1), std::domain_error);
}

TEST_CASE("clopper_pearson coverage simulation") {
  // Smoke version of the acceptance run: 2000 trials, n = 100, p = 0.8.
  const double gamma = 0.05;
  const int runs = 2000;
  int violations = 0;
  for (int r = 0; r < runs; ++r) {
    RngStream rng = make_stream(0xc0ffee, r);
    long long hits = 0;
    for (int i = 0; i < 100; ++i)
      if (rng.uniform01() < 0.8) ++hits;
    if (clopper_pearson_lower(hits, 100, gamma) > 0.8) ++violations;
  }
  double rate = violations / static_cast<double>(runs);
  CHECK(rate <= gamma + 3.0 * std::sqrt(gamma / runs));
}
