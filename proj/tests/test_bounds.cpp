#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/numeric/odeint.hpp>

#include <json.hpp>

#include "parafermion/bounds.hpp"
#include "parafermion/error.hpp"

using namespace parafermion;
using namespace parafermion::bounds;
using Real50 = boost::multiprecision::cpp_bin_float_50;

namespace {

// 1 - cos 2x written as 2 sin^2 x to avoid cancellation near 0.
double lhs(double a, double x) {
  const double s = std::sin(x);
  return 2.0 * s * s - 2.0 * a * x * std::sin(2.0 * x);
}

// Plain dense-grid supremum of lhs / x^2 on (0, 40].
double grid_supremum(double a) {
  double best = std::max(0.0, 2.0 - 4.0 * a);
  const int n = 400000;
  for (int k = 1; k <= n; ++k) {
    const double x = 40.0 * k / n;
    best = std::max(best, lhs(a, x) / (x * x));
  }
  return best;
}

double ceiling50(double a, double beta) {
  const Real50 arg = sqrt((4 * Real50(a) - Real50(beta)) / 8);
  return static_cast<double>(Real50(1) / 2 - log(tanh(arg)) / 2);
}

}  // namespace

TEST_CASE("beta ratio") {
  CHECK(beta_ratio(0.3, 0.0) == doctest::Approx(2.0 - 1.2));
  CHECK(beta_ratio(0.3, 1e-6) == doctest::Approx(2.0 - 1.2).epsilon(1e-6));
  CHECK(beta_ratio(0.3, 1.7) == doctest::Approx(lhs(0.3, 1.7) / (1.7 * 1.7)));
}

TEST_CASE("minimal beta at a = 1/4 is the Taylor floor") {
  const BetaProfile p = minimal_beta(0.25);
  CHECK(p.taylor_floor == 1.0);
  CHECK(std::abs(p.beta_min - 1.0) <= 1e-10);
}

TEST_CASE("minimal beta against a dense grid") {
  for (double a : {0.1, 0.25, 0.4, 0.5, 0.75, 1.0, 1.5, 3.0}) {
    const BetaProfile p = minimal_beta(a);
    const double oracle = grid_supremum(a);
    CHECK(p.beta_min >= p.taylor_floor);
    CHECK(p.beta_min >= oracle - 1e-12);
    CHECK(p.beta_min <= oracle + 1e-6);
    for (int k = 1; k <= 20000; ++k) {
      const double x = 20.0 * k / 20000.0;
      CHECK(lhs(a, x) <= p.beta_min * x * x + 1e-12);
    }
  }
}

TEST_CASE("fixed beta choices are admissible on their intervals") {
  for (double a = 0.25; a <= 0.75 + 1e-12; a += 0.01) CHECK(minimal_beta(a).beta_min <= 1.0 + 1e-9);
  for (double a = 0.5; a <= 1.0 + 1e-12; a += 0.01) CHECK(minimal_beta(a).beta_min <= 2.0 + 1e-9);
}

TEST_CASE("minimal beta examples") {
  CHECK(minimal_beta(0.5).beta_min == doctest::Approx(0.8328).epsilon(1e-3));
  CHECK(minimal_beta(1.0).beta_min == doctest::Approx(1.1731).epsilon(1e-3));
  CHECK_THROWS_AS(minimal_beta(0.0), Error);
}

TEST_CASE("theta variance envelope") {
  CHECK(theta_variance_envelope(0.5, 1.0, 0.05, 0.0) == doctest::Approx(0.0));
  // delta -> 0 leaves 2 t^2 / (4a - beta).
  CHECK(theta_variance_envelope(0.5, 1.0, 1e-12, 0.7) ==
        doctest::Approx(2.0 * 0.49 / 1.0).epsilon(1e-5));

  // Equality case of d/dt v <= (t + delta)/a + beta v / (2a (t + delta)).
  const double a = 0.5;
  const double beta = 1.0;
  const double delta = 0.05;
  std::vector<double> v{0.0};
  auto rhs = [&](const std::vector<double>& y, std::vector<double>& dy, double t) {
    dy[0] = (t + delta) / a + beta * y[0] / (2.0 * a * (t + delta));
  };
  boost::numeric::odeint::integrate_const(boost::numeric::odeint::runge_kutta4<std::vector<double>>(),
                                          rhs, v, 0.0, 1.0, 1e-4);
  CHECK(theta_variance_envelope(a, beta, delta, 1.0) == doctest::Approx(v[0]).epsilon(1e-9));

  CHECK_THROWS_AS(theta_variance_envelope(0.5, 2.0, 0.05, 1.0), Error);
}

TEST_CASE("variance ceiling") {
  CHECK(variance_ceiling(0.5, 1.0) == doctest::Approx(ceiling50(0.5, 1.0)).epsilon(1e-14));
  CHECK(variance_ceiling(0.5, 1.0) == doctest::Approx(1.04010664851).epsilon(1e-11));
  double previous = 0.0;
  for (double beta = 0.1; beta < 1.95; beta += 0.1) {
    const double c = variance_ceiling(0.5, beta);
    CHECK(c > previous);
    previous = c;
  }
  previous = std::numeric_limits<double>::infinity();
  for (double a = 0.3; a < 3.0; a += 0.1) {
    const double c = variance_ceiling(a, 1.0);
    CHECK(c < previous);
    CHECK(c > 0.5);
    previous = c;
  }
}

TEST_CASE("beta must stay below 4a") {
  CHECK_THROWS_AS(variance_ceiling(0.25, 1.0), Error);
  CHECK_THROWS_AS(variance_ceiling(0.2, 1.0), Error);
  CHECK_THROWS_AS(nontriviality_lower_bound(0.25, 0.1, 1.5), Error);
  try {
    variance_ceiling(0.25, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
    CHECK(std::string(e.what()).find("4a") != std::string::npos);
  }
}

TEST_CASE("nontriviality lower bound") {
  CHECK(nontriviality_lower_bound(0.5, 0.0, 1.0) == 1.0);
  const double c = ceiling50(0.5, 1.0);
  CHECK(nontriviality_lower_bound(0.5, 0.25, 1.0) == doctest::Approx(1.0 - 0.125 * c * c));
  const RootPair roots = solve_conformal_range();
  const double b0 = (3.0 * roots.a0 - 1.0) / 2.0;
  CHECK(std::abs(nontriviality_lower_bound(roots.a0, b0, 1.0)) < 1e-9);
  const double b1 = (3.0 * roots.a1 - 1.0) / 2.0;
  CHECK(std::abs(nontriviality_lower_bound(roots.a1, b1, 2.0)) < 1e-9);
}

TEST_CASE("conformal roots") {
  const RootPair r = solve_conformal_range(1e-12);
  CHECK(r.a0_digits.rfind("0.2500000022", 0) == 0);
  CHECK(r.a1_digits.rfind("0.8084748753", 0) == 0);
  CHECK(r.kappa0_digits.rfind("2.4737936342", 0) == 0);
  CHECK(r.kappa1_digits.rfind("7.9999999295", 0) == 0);
  // Frozen from the 50-digit solve.
  CHECK(r.a0_digits.rfind("0.2500000022011840554", 0) == 0);
  CHECK(r.a1_digits.rfind("0.8084748753206087960", 0) == 0);
  CHECK(r.kappa0 == doctest::Approx(2.0 / r.a1).epsilon(1e-15));
  CHECK(r.kappa1 == doctest::Approx(2.0 / r.a0).epsilon(1e-15));
  CHECK(std::abs(r.residual0) < 1e-12);
  CHECK(std::abs(r.residual1) < 1e-12);
  CHECK(std::abs(conformal_equation(r.a0, 1.0)) < 1e-8);
  CHECK(std::abs(conformal_equation(r.a1, 2.0)) < 1e-8);
  // G < 0 inside the interval with the matching beta.
  CHECK(conformal_equation(0.4, 1.0) < 0.0);
  CHECK(conformal_equation(0.7, 2.0) < 0.0);
  CHECK(conformal_equation(0.9, 2.0) > 0.0);
  CHECK_THROWS_AS(solve_conformal_range(1e-15), Error);
}

TEST_CASE("parse_range") {
  const Range r = parse_range("0:1:11");
  const std::vector<double> v = r.values();
  REQUIRE(v.size() == 11);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 1.0);
  CHECK(v[3] == doctest::Approx(0.3));
  const Range single = parse_range("0.5");
  CHECK(single.count == 1);
  CHECK(single.values() == std::vector<double>{0.5});
  CHECK(parse_range("-1:1:3").values() == std::vector<double>{-1.0, 0.0, 1.0});
  for (const char* bad : {"", "x", "0:1", "0:1:0", "0:1:2.5", "0:a:3"}) {
    CHECK_THROWS_AS(parse_range(bad), Error);
  }
}

TEST_CASE("region spot checks") {
  const RegionGrid g = region_scan(parse_range("0.2:1.0:5"), parse_range("-10:10:5"));
  REQUIRE(g.a_values.size() == 5);
  REQUIRE(g.sigma_values.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    const double a = g.a_values[i];
    const double beta = minimal_beta(a).beta_min;
    const std::size_t mid = g.index(i, 2);
    CHECK(g.sigma_values[2] == 0.0);
    CHECK(g.admissible[mid] == (beta < 4.0 * a));
    CHECK_FALSE(g.admissible[g.index(i, 0)]);
    CHECK_FALSE(g.admissible[g.index(i, 4)]);
    if (beta < 4.0 * a) {
      CHECK(g.lower_bound[mid] == 1.0);
      CHECK(g.beta[mid] == beta);
    }
  }

  const RegionGrid f = region_scan(parse_range("0.2:0.9:8"), parse_range("0.25"), BetaMode::kFixed);
  for (std::size_t i = 0; i < f.a_values.size(); ++i) {
    const double a = f.a_values[i];
    const double used = f.beta[f.index(i, 0)];
    if (a < 0.25) {
      CHECK(std::isnan(used));
      CHECK(std::isinf(f.lower_bound[f.index(i, 0)]));
      CHECK_FALSE(f.admissible[f.index(i, 0)]);
    } else if (a <= 0.75 + 1e-12) {
      CHECK(used == 1.0);
    } else {
      CHECK(used == 2.0);
    }
    if (!std::isnan(used)) {
      CHECK(f.lower_bound[f.index(i, 0)] ==
            doctest::Approx(nontriviality_lower_bound(a, 0.25, used)));
      CHECK(f.admissible[f.index(i, 0)] == (f.lower_bound[f.index(i, 0)] > 0.0));
    }
  }

  const RegionGrid one = region_scan(parse_range("0.3:0.9:7"), parse_range("-1:1:9"), BetaMode::kMinimal, 1);
  const RegionGrid many = region_scan(parse_range("0.3:0.9:7"), parse_range("-1:1:9"), BetaMode::kMinimal, 4);
  CHECK(one.lower_bound == many.lower_bound);
  CHECK(one.admissible == many.admissible);
}

TEST_CASE("writers") {
  std::ostringstream roots;
  write_roots_json(solve_conformal_range(), roots);
  const auto j = nlohmann::json::parse(roots.str());
  CHECK(j.contains("a0"));
  CHECK(j.contains("kappa1"));

  std::ostringstream csv;
  write_region_csv(region_scan(parse_range("0.5"), parse_range("0:1:2")), csv);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "a,sigma,beta_min,lower_bound,admissible");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 2);

  std::ostringstream profile;
  write_beta_profile_json(minimal_beta(0.5), profile);
  CHECK(nlohmann::json::parse(profile.str())["a"] == 0.5);
}
