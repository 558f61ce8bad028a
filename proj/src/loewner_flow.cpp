#include "parafermion/loewner_flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "parafermion/error.hpp"
#include "parafermion/io.hpp"
#include "parafermion/random.hpp"

namespace parafermion::loewner_flow {

namespace odeint = boost::numeric::odeint;

namespace {

// Driving value is linear on each segment: B(s) = start + slope * s for local
// time s in [0, step].
struct Segment {
  double start = 0.0;
  double slope = 0.0;
  double at(double s) const { return start + slope * s; }
};

Complex driving_point(double b) { return std::polar(1.0, 2.0 * b); }

// g and g' in one state: {Re g, Im g, Re g', Im g'}.
using ForwardState = std::array<double, 4>;
using BackwardState = std::array<double, 2>;

struct ForwardField {
  double a;
  Segment segment;

  void operator()(const ForwardState& x, ForwardState& dx, double s) const {
    const Complex e = driving_point(segment.at(s));
    const Complex g(x[0], x[1]);
    const Complex gp(x[2], x[3]);
    const Complex d = e - g;
    const Complex dg = 2.0 * a * g * (e + g) / d;
    const Complex dgp = 2.0 * a * (e * e + 2.0 * e * g - g * g) / (d * d) * gp;
    dx = {dg.real(), dg.imag(), dgp.real(), dgp.imag()};
  }
};

// Backward flow in reversed time: dw/ds = -2a w (e + w) / (e - w).
struct BackwardField {
  double a;
  Segment segment;

  void operator()(const BackwardState& x, BackwardState& dx, double s) const {
    const Complex e = driving_point(segment.at(s));
    const Complex w(x[0], x[1]);
    const Complex dw = -2.0 * a * w * (e + w) / (e - w);
    dx = {dw.real(), dw.imag()};
  }
};

enum class StepOutcome { kDone, kStopped, kStalled };

// Integrates local time [0, length] on one segment. `keep_going` is checked
// after every accepted step; returning false stops the integration.
template <class Stepper, class Field, class State, class KeepGoing>
StepOutcome integrate_segment(Stepper& stepper, const Field& field, State& x, double length,
                              double& dt, const IntegratorOptions& options,
                              KeepGoing&& keep_going) {
  stepper.reset();
  double s = 0.0;
  while (s < length) {
    const double remaining = length - s;
    const bool clipped = dt >= remaining;
    double h = clipped ? remaining : dt;
    const auto result = stepper.try_step(field, x, s, h);
    if (result == odeint::success) {
      if (clipped) {
        s = length;
        dt = std::max(dt, h);
      } else {
        dt = h;
      }
      if (!keep_going(x)) return StepOutcome::kStopped;
    } else {
      dt = h;
      if (dt < options.min_step) return StepOutcome::kStalled;
    }
  }
  return StepOutcome::kDone;
}

template <class State>
auto make_stepper(const IntegratorOptions& options) {
  return odeint::make_controlled(options.abs_tol, options.rel_tol,
                                 odeint::runge_kutta_dopri5<State>());
}

Segment forward_segment(const DrivingPath& path, std::size_t k) {
  return {path.values[k], (path.values[k + 1] - path.values[k]) / path.step};
}

}  // namespace

double DrivingPath::at(double t) const {
  require(!values.empty(), ErrorCode::kInvalidArgument, "empty driving path");
  if (t <= 0.0 || values.size() == 1) return values.front();
  const double pos = t / step;
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(k);
  return values[k] + frac * (values[k + 1] - values[k]);
}

DrivingPath DrivingPath::negated() const {
  DrivingPath out = *this;
  for (double& v : out.values) v = -v;
  return out;
}

DrivingPath sample_driving_path(std::uint64_t seed, double duration, double step) {
  require(step > 0.0, ErrorCode::kInvalidArgument, "driving step must be positive");
  require(duration >= 0.0, ErrorCode::kInvalidArgument, "duration must be non-negative");
  // The small slack keeps e.g. 1.0 / 0.01 from rounding down to 99.
  const auto steps = static_cast<std::size_t>(std::floor(duration / step + 1e-9));
  DrivingPath path;
  path.step = step;
  path.seed = seed;
  path.duration = duration;
  path.values.resize(steps + 1);
  path.values[0] = 0.0;
  PathStream stream(seed, 0);
  const double scale = std::sqrt(step);
  for (std::size_t k = 1; k <= steps; ++k) {
    path.values[k] = path.values[k - 1] + scale * stream.normal();
  }
  return path;
}

DrivingPath driving_path_from_values(std::vector<double> values, double step) {
  require(step > 0.0, ErrorCode::kInvalidArgument, "driving step must be positive");
  require(!values.empty(), ErrorCode::kInvalidArgument, "driving path needs at least one value");
  DrivingPath path;
  path.step = step;
  path.duration = step * static_cast<double>(values.size() - 1);
  path.values = std::move(values);
  return path;
}

ForwardTrajectory evolve_forward(Complex z, const DrivingPath& path, double a,
                                 const IntegratorOptions& options) {
  require(a > 0.0, ErrorCode::kInvalidArgument, "a must be positive");
  require(std::abs(z) < 1.0, ErrorCode::kOutOfDomain, "evolve_forward: |z| must be < 1");
  require(!path.values.empty(), ErrorCode::kInvalidArgument, "empty driving path");

  ForwardTrajectory traj;
  traj.point = z;
  const bool at_origin = z == Complex(0.0, 0.0);
  ForwardState x = {z.real(), z.imag(), 1.0, 0.0};
  traj.samples.push_back({0.0, z});
  if (at_origin) traj.deriv_at_zero.push_back({0.0, 1.0});

  auto stepper = make_stepper<ForwardState>(options);
  double dt = path.step;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const ForwardField field{a, forward_segment(path, k)};
    const auto keep_going = [&](const ForwardState& state) {
      const Complex g(state[0], state[1]);
      if (std::abs(g) >= 1.0) return false;
      // The driving point moves within the step; check against the segment
      // endpoint values, which bracket it for short steps.
      const double dist = std::min(std::abs(g - driving_point(field.segment.start)),
                                   std::abs(g - driving_point(path.values[k + 1])));
      return dist >= options.swallow_tol;
    };
    const auto outcome = integrate_segment(stepper, field, x, path.step, dt, options, keep_going);
    if (outcome != StepOutcome::kDone) {
      traj.alive = false;
      return traj;
    }
    const double t = path.time(k + 1);
    traj.samples.push_back({t, Complex(x[0], x[1])});
    if (at_origin) traj.deriv_at_zero.push_back({t, std::hypot(x[2], x[3])});
  }
  return traj;
}

double disk_delta_from_lifted(double lifted_delta) { return -std::expm1(-2.0 * lifted_delta); }

Complex trace_point(const DrivingPath& path, std::size_t index, double a, double delta,
                    const IntegratorOptions& options) {
  require(a > 0.0, ErrorCode::kInvalidArgument, "a must be positive");
  require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidArgument, "delta must lie in (0, 1)");
  require(index < path.size(), ErrorCode::kInvalidArgument, "trace index out of range");

  const Complex start = (1.0 - delta) * driving_point(path.values[index]);
  if (index == 0) return start;

  BackwardState x = {start.real(), start.imag()};
  auto stepper = make_stepper<BackwardState>(options);
  // The field is O(1/delta) at the start.
  double dt = std::min(path.step, 0.1 * delta * delta);
  const auto inside = [](const BackwardState& state) { return std::hypot(state[0], state[1]) < 1.0; };
  for (std::size_t k = index; k > 0; --k) {
    // Reversed time runs from t_k down to t_{k-1}.
    const Segment seg{path.values[k], (path.values[k - 1] - path.values[k]) / path.step};
    const BackwardField field{a, seg};
    const auto outcome = integrate_segment(stepper, field, x, path.step, dt, options, inside);
    if (outcome != StepOutcome::kDone) {
      fail(ErrorCode::kNumerical,
           "inverse flow left the disk at t = " + io::format_double(path.time(index)));
    }
  }
  return {x[0], x[1]};
}

CurveSample trace_curve(const DrivingPath& path, double a, double delta, std::size_t stride,
                        const IntegratorOptions& options) {
  require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidArgument, "delta must lie in (0, 1)");
  require(stride >= 1, ErrorCode::kInvalidArgument, "stride must be >= 1");
  CurveSample curve;
  curve.delta = delta;
  const std::size_t n = path.size();
  auto add = [&](std::size_t k) {
    try {
      const Complex p = trace_point(path, k, a, delta, options);
      curve.times.push_back(path.time(k));
      curve.points.push_back(p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNumerical) throw;
      ++curve.dropped;
    }
  };
  for (std::size_t k = 0; k < n; k += stride) add(k);
  if (n > 0 && (n - 1) % stride != 0) add(n - 1);
  return curve;
}

std::vector<double> winding_about(const CurveSample& curve, Complex z, double normal_arg,
                                  double max_increment) {
  std::vector<double> out;
  out.reserve(curve.points.size());
  if (curve.points.empty()) return out;
  Complex prev = curve.points.front() - z;
  require(prev != Complex(0.0, 0.0), ErrorCode::kInvalidArgument, "z lies on the curve");
  double lifted = std::arg(prev);
  out.push_back(lifted - normal_arg);
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const Complex cur = curve.points[k] - z;
    require(cur != Complex(0.0, 0.0), ErrorCode::kInvalidArgument, "z lies on the curve");
    const double inc = std::arg(cur / prev);
    if (std::abs(inc) >= max_increment) {
      fail(ErrorCode::kUnderResolved,
           "argument jump " + io::format_double(inc) + " at t = " +
               io::format_double(curve.times[k]) + " exceeds the resolution limit");
    }
    lifted += inc;
    out.push_back(lifted - normal_arg);
    prev = cur;
  }
  return out;
}

ResolvedWinding trace_with_winding(const DrivingPath& path, double a, double delta, Complex z,
                                   double normal_arg, std::size_t initial_stride,
                                   const IntegratorOptions& options) {
  std::size_t stride = std::max<std::size_t>(1, initial_stride);
  for (;;) {
    ResolvedWinding out;
    out.curve = trace_curve(path, a, delta, stride, options);
    out.stride = stride;
    try {
      out.winding = winding_about(out.curve, z, normal_arg);
      return out;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnderResolved || stride == 1) throw;
      stride /= 2;
    }
  }
}

void write_curve_csv(const CurveSample& curve, std::ostream& out) {
  io::CsvWriter csv(out, {"t", "re", "im"});
  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    csv.field(curve.times[k]).field(curve.points[k].real()).field(curve.points[k].imag());
    csv.end_row();
  }
}

}  // namespace parafermion::loewner_flow
