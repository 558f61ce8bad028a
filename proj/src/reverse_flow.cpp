#include "parafermion/reverse_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/tools/roots.hpp>

#include "parafermion/error.hpp"
#include "parafermion/io.hpp"
#include "parafermion/random.hpp"

namespace parafermion::reverse_flow {

namespace {

// Past this height the e^{-2r} corrections are below double resolution and
// sinh^2 would eventually overflow.
constexpr double kFlatHeight = 40.0;

// With theta frozen, s = sinh^2 r obeys ds/dt = 2a s (1 + s) / (s + c),
// c = sin^2 theta, so c log s + (1 - c) log(1 + s) grows by exactly 2a h.
// The c = 1 and c = 0 solutions are the sandwich bounds and bracket the root.
double advance_r(double r, double theta, double a, double h) {
  if (r > kFlatHeight) return r + a * h;
  const double c = std::sin(theta) * std::sin(theta);
  const double s0 = std::sinh(r) * std::sinh(r);
  const double growth = std::exp(2.0 * a * h);
  const double lo = s0 * growth;
  const double hi = std::max(lo, (1.0 + s0) * growth - 1.0);
  const double target = c * std::log(s0) + (1.0 - c) * std::log1p(s0) + 2.0 * a * h;
  const auto f = [&](double s) {
    return std::make_pair(c * std::log(s) + (1.0 - c) * std::log1p(s) - target,
                          c / s + (1.0 - c) / (1.0 + s));
  };
  const double guess = lo + (1.0 - c) * (hi - lo);
  const double s1 = boost::math::tools::newton_raphson_iterate(f, guess, lo, hi, 50);
  return std::asinh(std::sqrt(s1));
}

ReverseState initial_state(double delta) { return {0.0, 0.0, delta, 0.0, 0.0}; }

void check_common(double a, double delta, double dt) {
  require(a > 0.0, ErrorCode::kInvalidArgument, "a must be positive");
  require(delta > 0.0, ErrorCode::kInvalidArgument, "delta must be positive");
  require(dt > 0.0, ErrorCode::kInvalidArgument, "dt must be positive");
}

// Advances with adaptive steps until t reaches `until` or `stop(state)` holds.
template <class OnStep, class Stop>
ReverseState run(ReverseState state, double a, double dt, double until, PathStream& stream,
                 const SimulationOptions& options, OnStep&& on_step, Stop&& stop) {
  while (state.t < until && !stop(state)) {
    double h = step_size(state.r, dt, options.stiffness);
    const bool last = h >= until - state.t;
    if (last) h = until - state.t;
    const double dW = options.noise_sign * std::sqrt(h) * stream.normal();
    state = step_reverse(state, dW, h, a);
    if (last) state.t = until;
    on_step(state);
  }
  return state;
}

}  // namespace

double drift_theta(double theta, double r, double a) {
  if (r > kFlatHeight) return 0.0;
  const double sr = std::sinh(r);
  const double st = std::sin(theta);
  return -a * std::sin(2.0 * theta) / (2.0 * (sr * sr + st * st));
}

double drift_r(double theta, double r, double a) {
  if (r > kFlatHeight) return a;
  const double sr = std::sinh(r);
  const double st = std::sin(theta);
  return a * sr * std::cosh(r) / (sr * sr + st * st);
}

ReverseState step_reverse(const ReverseState& state, double dW, double dt, double a) {
  require(state.r > 0.0, ErrorCode::kInvalidArgument, "step_reverse: r must be positive");
  require(dt > 0.0, ErrorCode::kInvalidArgument, "step_reverse: dt must be positive");
  ReverseState next;
  next.t = state.t + dt;
  next.theta = state.theta + drift_theta(state.theta, state.r, a) * dt + dW;
  next.r = advance_r(state.r, state.theta, a, dt);
  next.b = state.b + dW;
  next.T = next.theta - next.b;
  return next;
}

double step_size(double r, double dt, double stiffness) {
  return std::min(dt, stiffness * r * r);
}

std::vector<ReverseState> simulate_reverse_path(double a, double delta, double duration,
                                                double dt, std::uint64_t seed,
                                                const SimulationOptions& options) {
  check_common(a, delta, dt);
  require(duration >= 0.0, ErrorCode::kInvalidArgument, "duration must be non-negative");
  PathStream stream(seed, options.path_index);
  std::vector<ReverseState> path{initial_state(delta)};
  run(path.front(), a, dt, duration, stream, options,
      [&](const ReverseState& s) { path.push_back(s); }, [](const ReverseState&) { return false; });
  return path;
}

ReverseState simulate_reverse_final(double a, double delta, double duration, double dt,
                                    std::uint64_t seed, const SimulationOptions& options) {
  check_common(a, delta, dt);
  require(duration >= 0.0, ErrorCode::kInvalidArgument, "duration must be non-negative");
  PathStream stream(seed, options.path_index);
  return run(initial_state(delta), a, dt, duration, stream, options, [](const ReverseState&) {},
             [](const ReverseState&) { return false; });
}

TInfinitySample estimate_T_infinity(double a, double delta, double dt, double tail_tol,
                                    std::uint64_t seed, const SimulationOptions& options) {
  check_common(a, delta, dt);
  require(tail_tol > 0.0, ErrorCode::kInvalidArgument, "tail_tol must be positive");
  PathStream stream(seed, options.path_index);

  const double cap = options.tau_cap / a;
  ReverseState state = run(initial_state(delta), a, dt, cap, stream, options,
                           [](const ReverseState&) {},
                           [](const ReverseState& s) { return s.r >= kTailHeight; });
  if (state.r < kTailHeight) {
    fail(ErrorCode::kNumerical, "r did not reach log(sqrt 3) before t = " + io::format_double(cap) +
                                    "; check dt and delta");
  }

  TInfinitySample out;
  out.tau = state.t;
  out.T_at_tau = state.T;
  // Padded so rounding in t cannot leave the bound a hair above tail_tol.
  const double remaining =
      tail_tol >= 2.0 / 3.0 ? 0.0 : std::log(2.0 / (3.0 * tail_tol)) / a * (1.0 + 1e-12) + 1e-12;
  double excursion = 0.0;
  state = run(state, a, dt, out.tau + remaining, stream, options,
              [&](const ReverseState& s) {
                excursion = std::max(excursion, std::abs(s.T - out.T_at_tau));
              },
              [](const ReverseState&) { return false; });
  out.value = state.T;
  out.stop_time = state.t;
  out.tail_bound = (2.0 / 3.0) * std::exp(-a * (state.t - out.tau));
  out.max_excursion_after_tau = excursion;
  return out;
}

double time_change_rate(double theta_hat, double s, double delta, double a) {
  const double u = s + delta;
  if (u > kFlatHeight) return 1.0 / a;
  const double su = std::sinh(u);
  const double st = std::sin(theta_hat);
  // (cosh 2u - cos 2 theta) / (a sinh 2u)
  return (su * su + st * st) / (a * su * std::cosh(u));
}

std::vector<TimeChangedState> simulate_time_changed(double a, double delta, double s_max,
                                                    double ds, std::uint64_t seed,
                                                    const SimulationOptions& options) {
  check_common(a, delta, ds);
  require(s_max >= 0.0, ErrorCode::kInvalidArgument, "s_max must be non-negative");
  PathStream stream(seed, options.path_index);

  const auto outer = static_cast<std::size_t>(std::floor(s_max / ds + 1e-9));
  std::vector<TimeChangedState> path;
  path.reserve(outer + 1);
  TimeChangedState state{0.0, 0.0, 0.0, 0.0, delta};
  path.push_back(state);
  for (std::size_t k = 0; k < outer; ++k) {
    const double s0 = static_cast<double>(k) * ds;
    const double h_cap = options.stiffness * (s0 + delta);
    const auto substeps = static_cast<std::size_t>(std::ceil(ds / std::min(ds, h_cap)));
    const double h = ds / static_cast<double>(substeps);
    double s = s0;
    for (std::size_t j = 0; j < substeps; ++j) {
      const double u = s + delta;
      const double drift = -std::sin(2.0 * state.theta_hat) / std::sinh(2.0 * u);
      const double rate = time_change_rate(state.theta_hat, s, delta, a);
      const double dW = options.noise_sign * std::sqrt(h) * stream.normal();
      state.theta_hat += drift * h + std::sqrt(rate) * dW;
      state.T_hat += drift * h;
      state.tau += rate * h;
      s = s0 + static_cast<double>(j + 1) * h;
    }
    state.s = static_cast<double>(k + 1) * ds;
    path.push_back(state);
  }
  return path;
}

double sandwich_lower(double a, double delta, double t) {
  return std::asinh(std::sinh(delta) * std::exp(a * t));
}

double sandwich_upper(double a, double delta, double t) {
  return std::acosh(std::cosh(delta) * std::exp(a * t));
}

TauBounds tau_bounds(double a, double delta, double s) {
  const double u = s + delta;
  TauBounds out;
  out.exact_lower = std::log(std::cosh(u) / std::cosh(delta)) / a;
  out.exact_upper = (std::log(std::sinh(u)) - std::log(std::sinh(delta))) / a;
  out.affine_lower = (u - std::log(2.0 * std::cosh(delta))) / a;
  out.affine_upper = (u - std::log(2.0 * std::sinh(delta))) / a;
  return out;
}

SandwichReport sandwich_check(std::span<const ReverseState> path, double a, double delta,
                              double slack) {
  SandwichReport report;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& s : path) {
    const double v = std::max(sandwich_lower(a, delta, s.t) - s.r,
                              s.r - sandwich_upper(a, delta, s.t));
    if (v > report.max_violation) {
      report.max_violation = v;
      report.worst_time = s.t;
    }
  }
  if (path.empty()) report.max_violation = 0.0;
  report.passed = report.max_violation <= slack;
  return report;
}

void write_path_csv(std::span<const ReverseState> path, std::ostream& out) {
  io::CsvWriter csv(out, {"t", "theta", "r", "T"});
  for (const auto& s : path) {
    csv.field(s.t).field(s.theta).field(s.r).field(s.T);
    csv.end_row();
  }
}

}  // namespace parafermion::reverse_flow
