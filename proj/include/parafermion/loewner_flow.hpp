#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <vector>

namespace parafermion::loewner_flow {

using Complex = std::complex<double>;

// Brownian driving function B sampled at multiples of `step`; linear in
// between.
struct DrivingPath {
  double step = 0.0;
  std::vector<double> values;
  std::uint64_t seed = 0;
  double duration = 0.0;

  std::size_t size() const { return values.size(); }
  double time(std::size_t k) const { return static_cast<double>(k) * step; }
  double at(double t) const;
  DrivingPath negated() const;
};

DrivingPath sample_driving_path(std::uint64_t seed, double duration, double step);

// Deterministic driving values, e.g. B = 0 for symmetry checks.
DrivingPath driving_path_from_values(std::vector<double> values, double step);

struct IntegratorOptions {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  // Distance from e^{2iB_t} below which a forward trajectory is swallowed.
  double swallow_tol = 1e-6;
  double min_step = 1e-14;
};

struct TrajectorySample {
  double t = 0.0;
  Complex g;
};

struct DerivativeSample {
  double t = 0.0;
  double value = 0.0;
};

struct ForwardTrajectory {
  Complex point;
  std::vector<TrajectorySample> samples;
  bool alive = true;
  // g_t'(0); only populated when point == 0.
  std::vector<DerivativeSample> deriv_at_zero;
};

// Integrates the radial Loewner equation
//   d/dt g_t(z) = 2a g_t(z) (e^{2iB_t} + g_t(z)) / (e^{2iB_t} - g_t(z))
// from g_0(z) = z, recording g at every driving sample time.
ForwardTrajectory evolve_forward(Complex z, const DrivingPath& path, double a,
                                 const IntegratorOptions& options = {});

struct CurveSample {
  std::vector<double> times;
  std::vector<Complex> points;
  double delta = 0.0;
  // Samples whose inverse-flow integration left the disk.
  std::size_t dropped = 0;
};

// g_t^{-1}((1 - delta) e^{2iB_t}) at t = path.time(index), by integrating the
// Loewner vector field backwards over the driving segment [0, t].
// Throws ErrorCode::kNumerical if the backward integration leaves the disk.
Complex trace_point(const DrivingPath& path, std::size_t index, double a, double delta,
                    const IntegratorOptions& options = {});

// Curve approximation at every `stride`-th driving sample (plus the last).
CurveSample trace_curve(const DrivingPath& path, double a, double delta,
                        std::size_t stride = 1, const IntegratorOptions& options = {});

// Disk-side regularization matching a reverse flow started at i*lifted_delta:
// (1 - delta) = e^{-2 lifted_delta}.
double disk_delta_from_lifted(double lifted_delta);

// W^z at every curve sample: arg(gamma(t) - z) - normal_arg, tracked
// continuously from the principal value at the first sample. Throws
// ErrorCode::kUnderResolved when consecutive samples turn by at least
// `max_increment` about z.
std::vector<double> winding_about(const CurveSample& curve, Complex z, double normal_arg,
                                  double max_increment = std::numbers::pi / 2);

struct ResolvedWinding {
  CurveSample curve;
  std::vector<double> winding;
  std::size_t stride = 1;
};

// Traces the curve and halves the sampling stride until winding_about(z)
// resolves every increment.
ResolvedWinding trace_with_winding(const DrivingPath& path, double a, double delta, Complex z,
                                   double normal_arg, std::size_t initial_stride,
                                   const IntegratorOptions& options = {});

// CSV: t,re,im
void write_curve_csv(const CurveSample& curve, std::ostream& out);

}  // namespace parafermion::loewner_flow
