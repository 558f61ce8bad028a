#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "parafermion/error.hpp"
#include "parafermion/reverse_flow.hpp"

using namespace parafermion;
using namespace parafermion::reverse_flow;

TEST_CASE("drift symmetries") {
  for (double r : {0.01, 0.3, 2.0}) {
    CHECK(std::abs(drift_theta(std::numbers::pi / 2, r, 0.7)) < 1e-15);
    CHECK(drift_r(0.4, r, 0.7) > 0.0);
    CHECK(drift_theta(-0.4, r, 0.7) == -drift_theta(0.4, r, 0.7));
    CHECK(drift_r(-0.4, r, 0.7) == drift_r(0.4, r, 0.7));
  }
  CHECK(drift_r(0.4, 1.1, 0.5) ==
        doctest::Approx(0.5 * std::sinh(2.2) / (std::cosh(2.2) - std::cos(0.8))));
  CHECK(drift_theta(0.4, 1.1, 0.5) ==
        doctest::Approx(-0.5 * std::sin(0.8) / (std::cosh(2.2) - std::cos(0.8))));
}

TEST_CASE("step_reverse keeps T = theta - b and raises r") {
  ReverseState s{0.0, 0.1, 0.05, -0.2, 0.3};
  const ReverseState n = step_reverse(s, 0.01, 1e-4, 0.5);
  CHECK(n.r > s.r);
  CHECK(n.b == s.b + 0.01);
  CHECK(n.T == doctest::Approx(n.theta - n.b).epsilon(1e-14));
  CHECK(n.t == doctest::Approx(1e-4));
  s.r = 0.0;
  CHECK_THROWS_AS(step_reverse(s, 0.0, 1e-3, 0.5), Error);
  s.r = 0.1;
  CHECK_THROWS_AS(step_reverse(s, 0.0, 0.0, 0.5), Error);
}

TEST_CASE("zero duration is the initial state") {
  const std::vector<ReverseState> p = simulate_reverse_path(0.5, 0.1, 0.0, 0.01, 3);
  REQUIRE(p.size() == 1);
  CHECK(p[0].theta == 0.0);
  CHECK(p[0].r == 0.1);
  CHECK(p[0].T == 0.0);
  CHECK(p[0].b == 0.0);
}

TEST_CASE("paths are deterministic, monotone in r and end at duration") {
  const auto p = simulate_reverse_path(0.5, 0.01, 1.0, 0.01, 17);
  const auto q = simulate_reverse_path(0.5, 0.01, 1.0, 0.01, 17);
  REQUIRE(p.size() == q.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    CHECK(p[k].theta == q[k].theta);
    CHECK(p[k].r == q[k].r);
  }
  for (std::size_t k = 1; k < p.size(); ++k) {
    CHECK(p[k].r > p[k - 1].r);
    CHECK(p[k].t > p[k - 1].t);
    CHECK(p[k].T == doctest::Approx(p[k].theta - p[k].b).epsilon(1e-12));
  }
  CHECK(p.back().t == doctest::Approx(1.0).epsilon(1e-12));
  const ReverseState last = simulate_reverse_final(0.5, 0.01, 1.0, 0.01, 17);
  CHECK(last.theta == p.back().theta);
  CHECK(last.r == p.back().r);
}

TEST_CASE("flipping the noise negates theta and T, leaves r") {
  SimulationOptions flipped;
  flipped.noise_sign = -1.0;
  const auto p = simulate_reverse_path(0.8, 0.02, 1.0, 0.01, 5);
  const auto q = simulate_reverse_path(0.8, 0.02, 1.0, 0.01, 5, flipped);
  REQUIRE(p.size() == q.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    CHECK(q[k].theta == -p[k].theta);
    CHECK(q[k].T == -p[k].T);
    CHECK(q[k].r == p[k].r);
  }
}

TEST_CASE("sandwich bounds hold along every path") {
  for (double a : {0.25, 0.5, 1.0, 2.0}) {
    for (double delta : {1e-3, 1e-2, 0.1}) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto p = simulate_reverse_path(a, delta, 2.0, 0.01, seed);
        const SandwichReport rep = sandwich_check(p, a, delta, 1e-10);
        CHECK(rep.passed);
      }
    }
  }
}

TEST_CASE("sandwich closed forms") {
  CHECK(sandwich_lower(0.5, 0.1, 0.0) == doctest::Approx(0.1));
  CHECK(sandwich_upper(0.5, 0.1, 0.0) == doctest::Approx(0.1));
  for (double t : {0.1, 1.0, 5.0}) {
    CHECK(sandwich_lower(0.5, 0.1, t) < sandwich_upper(0.5, 0.1, t));
    CHECK(std::sinh(sandwich_lower(0.5, 0.1, t)) == doctest::Approx(std::sinh(0.1) * std::exp(0.5 * t)));
    CHECK(std::cosh(sandwich_upper(0.5, 0.1, t)) == doctest::Approx(std::cosh(0.1) * std::exp(0.5 * t)));
  }
  // With theta frozen at 0 or pi/2, r follows the upper or lower curve.
  ReverseState s{0.0, 0.0, 0.1, 0.0, 0.0};
  const ReverseState upper = step_reverse(s, 0.0, 0.5, 0.5);
  CHECK(upper.r == doctest::Approx(sandwich_upper(0.5, 0.1, 0.5)).epsilon(1e-12));
  s.theta = std::numbers::pi / 2;
  const ReverseState lower = step_reverse(s, 0.0, 0.5, 0.5);
  CHECK(lower.r == doctest::Approx(sandwich_lower(0.5, 0.1, 0.5)).epsilon(1e-12));
}

TEST_CASE("sample mean of T at fixed time is near zero") {
  const int n = 4000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    SimulationOptions o;
    o.path_index = static_cast<std::uint64_t>(i);
    const double T = simulate_reverse_final(0.5, 0.01, 1.0, 0.01, 99, o).T;
    sum += T;
    sum2 += T * T;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("T_infinity samples") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    SimulationOptions o;
    o.path_index = i;
    const TInfinitySample s = estimate_T_infinity(0.5, 0.01, 0.01, 1e-3, 7, o);
    CHECK(s.tail_bound <= 1e-3);
    CHECK(s.stop_time >= s.tau);
    CHECK(s.max_excursion_after_tau <= 2.0 / 3.0);
    CHECK(std::abs(s.value - s.T_at_tau) <= s.max_excursion_after_tau + 1e-15);
  }
  CHECK_THROWS_AS(estimate_T_infinity(0.5, 0.01, 0.01, 0.0, 7), Error);
}

TEST_CASE("tau bounds are ordered") {
  for (double a : {0.25, 0.5, 1.0}) {
    for (double delta : {1e-3, 0.05, 0.3}) {
      for (double s : {0.01, 0.5, 2.0, 6.0}) {
        const TauBounds b = tau_bounds(a, delta, s);
        CHECK(b.affine_lower <= b.exact_lower + 1e-12);
        CHECK(b.exact_lower <= b.exact_upper);
        CHECK(b.exact_upper <= b.affine_upper + 1e-12);
      }
    }
  }
  const TauBounds zero = tau_bounds(0.5, 0.1, 0.0);
  CHECK(std::abs(zero.exact_lower) < 1e-15);
  CHECK(std::abs(zero.exact_upper) < 1e-15);
}

TEST_CASE("time-changed paths") {
  const double a = 0.5;
  const double delta = 0.05;
  const auto p = simulate_time_changed(a, delta, 2.0, 0.01, 13);
  REQUIRE(p.size() == 201);
  CHECK(p.front().tau == 0.0);
  CHECK(p.front().theta_hat == 0.0);
  for (std::size_t k = 1; k < p.size(); ++k) {
    CHECK(p[k].tau > p[k - 1].tau);
    CHECK(p[k].r_hat() == doctest::Approx(p[k].s + delta));
    CHECK(p[k].s == doctest::Approx(0.01 * k));
    const TauBounds b = tau_bounds(a, delta, p[k].s);
    CHECK(p[k].tau >= b.exact_lower * (1.0 - 1e-2));
    CHECK(p[k].tau <= b.exact_upper * (1.0 + 1e-2));
  }
  CHECK(time_change_rate(0.0, 0.3, 0.1, 0.5) ==
        doctest::Approx((std::cosh(0.8) - 1.0) / (0.5 * std::sinh(0.8))));
}

TEST_CASE("time-changed second moment stays under the envelope") {
  const double a = 0.5;
  const double beta = 1.0;
  const double delta = 0.05;
  const int n = 2000;
  std::vector<double> sum2(5, 0.0);
  std::vector<double> sum4(5, 0.0);
  const std::size_t marks[] = {25, 50, 100, 200};
  for (int i = 0; i < n; ++i) {
    SimulationOptions o;
    o.path_index = static_cast<std::uint64_t>(i);
    const auto p = simulate_time_changed(a, delta, 2.0, 0.01, 31, o);
    for (int m = 0; m < 4; ++m) {
      const double v = p[marks[m]].theta_hat * p[marks[m]].theta_hat;
      sum2[m] += v;
      sum4[m] += v * v;
    }
  }
  for (int m = 0; m < 4; ++m) {
    const double s = 0.01 * static_cast<double>(marks[m]);
    const double k = beta / (2.0 * a);
    const double envelope = 2.0 / (4.0 * a - beta) *
                            (std::pow(s + delta, 2) - std::pow(delta, 2.0 - k) * std::pow(s + delta, k));
    const double mean = sum2[m] / n;
    const double se = std::sqrt((sum4[m] / n - mean * mean) / n);
    CHECK(mean <= envelope + 3.0 * se);
  }
}
