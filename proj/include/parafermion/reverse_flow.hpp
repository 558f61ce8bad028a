#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace parafermion::reverse_flow {

// Lifted reverse flow Z_t = theta + i r started at i*delta, with the split
// theta = T + b where b is the accumulated driving Brownian motion.
struct ReverseState {
  double t = 0.0;
  double theta = 0.0;
  double r = 0.0;
  double b = 0.0;
  double T = 0.0;
};

// Reverse flow after the time change that makes r = s + delta linear.
struct TimeChangedState {
  double s = 0.0;
  double theta_hat = 0.0;
  double T_hat = 0.0;
  double tau = 0.0;  // original time elapsed
  double delta = 0.0;

  double r_hat() const { return s + delta; }
};

struct TInfinitySample {
  double value = 0.0;       // T at the stopping time
  double tail_bound = 0.0;  // (2/3) e^{-a (stop - tau)}
  double stop_time = 0.0;
  double tau = 0.0;         // first time with r >= log sqrt 3
  double T_at_tau = 0.0;
  double max_excursion_after_tau = 0.0;  // sup |T_t - T_tau| for t >= tau
};

struct SimulationOptions {
  // Step h = min(dt, stiffness * r^2): the drift is O(a / r) near the origin.
  double stiffness = 0.05;
  // Sign applied to every Brownian increment; -1 gives the mirrored path.
  double noise_sign = 1.0;
  // Stream index under the master seed (one stream per Monte Carlo path).
  std::uint64_t path_index = 0;
  // Search cap for the first time r reaches log sqrt 3, in units of 1/a.
  double tau_cap = 50.0;
};

// log(sqrt(3)): beyond this height |dT/dt| <= 2a e^{-2r} decays like e^{-at}.
inline constexpr double kTailHeight = 0.54930614433405484570;

double drift_theta(double theta, double r, double a);
double drift_r(double theta, double r, double a);

// One step: Euler-Maruyama in theta, and r advanced by the exact solution of
// its equation with theta frozen at the start of the step. The r update stays
// inside the sandwich bounds. Throws ErrorCode::kInvalidArgument for r <= 0
// or dt <= 0.
ReverseState step_reverse(const ReverseState& state, double dW, double dt, double a);

double step_size(double r, double dt, double stiffness);

// Every internal step on [0, duration]; the last state sits at t = duration.
std::vector<ReverseState> simulate_reverse_path(double a, double delta, double duration,
                                                double dt, std::uint64_t seed,
                                                const SimulationOptions& options = {});

// Same dynamics as simulate_reverse_path, keeping only the state at t = duration.
ReverseState simulate_reverse_final(double a, double delta, double duration, double dt,
                                    std::uint64_t seed, const SimulationOptions& options = {});

// Runs until tau (r >= log sqrt 3) and then until the remaining drift bound
// (2/3) e^{-a s} drops below tail_tol. Throws ErrorCode::kNumerical when tau
// is not reached by options.tau_cap / a.
TInfinitySample estimate_T_infinity(double a, double delta, double dt, double tail_tol,
                                    std::uint64_t seed, const SimulationOptions& options = {});

// Euler-Maruyama on the time-changed system, reported on the grid s = k*ds.
// Substeps are capped at stiffness * (s + delta) to resolve the O(1/(s+delta))
// drift near s = 0.
std::vector<TimeChangedState> simulate_time_changed(double a, double delta, double s_max,
                                                    double ds, std::uint64_t seed,
                                                    const SimulationOptions& options = {});

// d tau / ds at height s + delta.
double time_change_rate(double theta_hat, double s, double delta, double a);

// Pathwise bounds on r: asinh(sinh(delta) e^{at}) <= r <= acosh(cosh(delta) e^{at}).
double sandwich_lower(double a, double delta, double t);
double sandwich_upper(double a, double delta, double t);

// Bounds on the time change tau(s). The exact forms come from integrating the
// extreme rates; the affine forms relax them with log(2x) bounds.
struct TauBounds {
  double exact_lower = 0.0;   // log(cosh(s+delta)/cosh(delta)) / a
  double exact_upper = 0.0;   // log(sinh(s+delta)/sinh(delta)) / a
  double affine_lower = 0.0;  // (s + delta - log(2 cosh delta)) / a
  double affine_upper = 0.0;  // (s + delta - log(2 sinh delta)) / a
};
TauBounds tau_bounds(double a, double delta, double s);

struct SandwichReport {
  bool passed = true;
  // max over samples of max(lower - r, r - upper); negative means slack left.
  double max_violation = 0.0;
  double worst_time = 0.0;
};

SandwichReport sandwich_check(std::span<const ReverseState> path, double a, double delta,
                              double slack = 0.0);

// CSV: t,theta,r,T
void write_path_csv(std::span<const ReverseState> path, std::ostream& out);

}  // namespace parafermion::reverse_flow
