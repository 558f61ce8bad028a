#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace parafermion::bounds {

// (1 - cos 2x - 2ax sin 2x) / x^2, with the x -> 0 limit 2 - 4a.
double beta_ratio(double a, double x);

struct BetaProfile {
  double a = 0.0;
  double beta_min = 0.0;
  double x_argmax = 0.0;      // 0 when the Taylor floor wins
  double taylor_floor = 0.0;  // max(0, 2 - 4a)
  double x_max = 0.0;         // search range actually used
};

// Smallest beta with 1 - cos 2x - 2ax sin 2x <= beta x^2 for all x > 0.
// Grid of `grid` points on (0, x_max] plus Brent refinement around
// every grid-local maximum. x_max is doubled until the tail bound
// (2 + 2ax)/x^2 at x_max drops below the supremum found.
BetaProfile minimal_beta(double a, double x_max = 20.0, double refine_tol = 1e-10,
                         std::size_t grid = 10000);

// (2/(4a - beta)) [(t+delta)^2 - delta^{2-k} (t+delta)^k], k = beta/(2a).
double theta_variance_envelope(double a, double beta, double delta, double t);

// 1/2 - 1/2 log tanh sqrt((4a - beta)/8).
double variance_ceiling(double a, double beta);

// 1 - 2 sigma^2 variance_ceiling(a, beta)^2.
double nontriviality_lower_bound(double a, double sigma, double beta);

// count evenly spaced values from start to stop inclusive.
struct Range {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 1;

  std::vector<double> values() const;
};

// "start:stop:count" or a single number.
Range parse_range(const std::string& text);

// A fixed beta with the a-interval on which it is known to be admissible.
struct FixedBeta {
  double beta = 0.0;
  double a_min = 0.0;
  double a_max = 0.0;
};

// beta = 1 on [1/4, 3/4] and beta = 2 on [1/2, 1].
std::vector<FixedBeta> standard_beta_choices();

enum class BetaMode { kMinimal, kFixed };

struct RegionGrid {
  std::vector<double> a_values;
  std::vector<double> sigma_values;
  BetaMode mode = BetaMode::kMinimal;
  // Row-major [i_a * sigma_values.size() + j_sigma].
  std::vector<double> beta;  // beta used; NaN when none applies
  std::vector<double> lower_bound;  // -inf when no ceiling exists
  std::vector<bool> admissible;

  std::size_t index(std::size_t i, std::size_t j) const { return i * sigma_values.size() + j; }
};

RegionGrid region_scan(const Range& a_range, const Range& sigma_range,
                       BetaMode mode = BetaMode::kMinimal, unsigned workers = 0,
                       const std::vector<FixedBeta>& choices = standard_beta_choices());

// G(a) = ((3a-1)^2 / 8) [1 - log tanh sqrt((4a - beta)/8)]^2 - 1 in double.
double conformal_equation(double a, double beta);

struct RootPair {
  double a0 = 0.0;
  double a1 = 0.0;
  double kappa0 = 0.0;  // 2 / a1
  double kappa1 = 0.0;  // 2 / a0
  double residual0 = 0.0;
  double residual1 = 0.0;
  std::string a0_digits;  // 25 significant digits
  std::string a1_digits;
  std::string kappa0_digits;
  std::string kappa1_digits;
};

// Roots of G with beta = 1 nearest a = 1/4 and beta = 2 nearest a = 1,
// solved in 50-digit arithmetic. Throws ErrorCode::kInvalidArgument for
// tol < 1e-14 and ErrorCode::kNumerical on a bracketing failure.
RootPair solve_conformal_range(double tol = 1e-12);

// CSV: a,sigma,beta_min,lower_bound,admissible
void write_region_csv(const RegionGrid& grid, std::ostream& out);
void write_roots_json(const RootPair& roots, std::ostream& out);
void write_beta_profile_json(const BetaProfile& profile, std::ostream& out);

}  // namespace parafermion::bounds
