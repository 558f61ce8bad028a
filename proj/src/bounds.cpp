#include "parafermion/bounds.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/tools/minima.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <json.hpp>

#include "parafermion/error.hpp"
#include "parafermion/io.hpp"
#include "parafermion/parallel.hpp"

namespace parafermion::bounds {

namespace {

using Real = boost::multiprecision::cpp_bin_float_50;

void require_ceiling(double a, double beta) {
  require(a > 0.0, ErrorCode::kInvalidArgument, "a must be positive");
  require(beta > 0.0, ErrorCode::kInvalidArgument, "beta must be positive");
  require(beta < 4.0 * a, ErrorCode::kInvalidArgument,
          "beta must be < 4a (beta = " + io::format_double(beta) +
              ", 4a = " + io::format_double(4.0 * a) + ")");
}

double tail_bound(double a, double x) { return (2.0 + 2.0 * a * x) / (x * x); }

struct Sup {
  double value = -std::numeric_limits<double>::infinity();
  double x = 0.0;
};

Sup grid_supremum(double a, double x_max, std::size_t grid, double refine_tol) {
  const double h = x_max / static_cast<double>(grid);
  std::vector<double> f(grid + 1);
  for (std::size_t i = 1; i <= grid; ++i) f[i] = beta_ratio(a, h * static_cast<double>(i));
  f[0] = 2.0 - 4.0 * a;

  // Bits of x-precision for Brent; the value error is quadratic in it.
  const int bits = std::clamp(
      static_cast<int>(std::ceil(-std::log2(std::max(refine_tol, 1e-15) / x_max))), 10,
      std::numeric_limits<double>::digits / 2);
  Sup best;
  for (std::size_t i = 1; i <= grid; ++i) {
    const bool left = f[i] >= f[i - 1];
    const bool right = i == grid || f[i] >= f[i + 1];
    if (!left || !right) continue;
    double x = h * static_cast<double>(i);
    double v = f[i];
    if (i < grid) {
      const auto neg = [a](double y) { return -beta_ratio(a, y); };
      const auto r = boost::math::tools::brent_find_minima(neg, h * static_cast<double>(i - 1),
                                                           h * static_cast<double>(i + 1), bits);
      if (-r.second > v) {
        x = r.first;
        v = -r.second;
      }
    }
    if (v > best.value) best = {v, x};
  }
  return best;
}

Real conformal_g(const Real& a, int beta) {
  const Real u = sqrt((4 * a - beta) / 8);
  const Real l = 1 - log(tanh(u));
  const Real c = 3 * a - 1;
  return c * c / 8 * l * l - 1;
}

Real conformal_dg(const Real& a, int beta) {
  const Real u = sqrt((4 * a - beta) / 8);
  const Real l = 1 - log(tanh(u));
  const Real c = 3 * a - 1;
  const Real dl = -2 / sinh(2 * u) / (4 * u);
  return Real(3) / 4 * c * l * l + c * c / 4 * l * dl;
}

Real bisect_then_newton(Real lo, Real hi, int beta, double tol) {
  Real g_lo = conformal_g(lo, beta);
  require((g_lo > 0) != (conformal_g(hi, beta) > 0), ErrorCode::kNumerical,
          "conformal root not bracketed");
  while (hi - lo > tol) {
    const Real mid = (lo + hi) / 2;
    const Real g_mid = conformal_g(mid, beta);
    if ((g_mid > 0) == (g_lo > 0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  Real a = (lo + hi) / 2;
  const Real width = hi - lo;
  for (int it = 0; it < 20; ++it) {
    const Real step = conformal_g(a, beta) / conformal_dg(a, beta);
    a -= step;
    require(abs(a - (lo + hi) / 2) <= 4 * width, ErrorCode::kNumerical,
            "Newton polish left the bisection bracket");
    if (abs(step) < Real("1e-45")) break;
  }
  return a;
}

std::string digits(const Real& x) { return x.str(25); }

}  // namespace

double beta_ratio(double a, double x) {
  if (x == 0.0) return 2.0 - 4.0 * a;
  // 1 - cos 2x = 2 sin^2 x avoids cancellation at small x.
  const double s = std::sin(x) / x;
  return 2.0 * s * s - 2.0 * a * std::sin(2.0 * x) / x;
}

BetaProfile minimal_beta(double a, double x_max, double refine_tol, std::size_t grid) {
  require(a > 0.0, ErrorCode::kInvalidArgument, "a must be positive");
  require(x_max >= 10.0, ErrorCode::kInvalidArgument, "x_max must be >= 10");
  require(refine_tol > 0.0, ErrorCode::kInvalidArgument, "refine_tol must be positive");
  require(grid >= 10, ErrorCode::kInvalidArgument, "grid must have at least 10 points");

  BetaProfile out;
  out.a = a;
  out.taylor_floor = std::max(0.0, 2.0 - 4.0 * a);
  Sup sup = grid_supremum(a, x_max, grid, refine_tol);
  // The ratio is bounded by (2 + 2ax)/x^2 beyond x_max, which is decreasing.
  for (int doubling = 0; doubling < 20 && tail_bound(a, x_max) > std::max(sup.value, out.taylor_floor);
       ++doubling) {
    x_max *= 2.0;
    grid *= 2;
    sup = grid_supremum(a, x_max, grid, refine_tol);
  }
  require(tail_bound(a, x_max) <= std::max(sup.value, out.taylor_floor), ErrorCode::kNumerical,
          "tail of the beta ratio not controlled");
  out.x_max = x_max;
  if (sup.value > out.taylor_floor) {
    out.beta_min = sup.value;
    out.x_argmax = sup.x;
  } else {
    out.beta_min = out.taylor_floor;
    out.x_argmax = 0.0;
  }
  return out;
}

double theta_variance_envelope(double a, double beta, double delta, double t) {
  require_ceiling(a, beta);
  require(delta > 0.0, ErrorCode::kInvalidArgument, "delta must be positive");
  require(t >= 0.0, ErrorCode::kInvalidArgument, "t must be non-negative");
  if (t == 0.0) return 0.0;
  const double k = beta / (2.0 * a);
  const double u = t + delta;
  return 2.0 / (4.0 * a - beta) * (u * u - std::pow(delta, 2.0 - k) * std::pow(u, k));
}

double variance_ceiling(double a, double beta) {
  require_ceiling(a, beta);
  return 0.5 - 0.5 * std::log(std::tanh(std::sqrt((4.0 * a - beta) / 8.0)));
}

double nontriviality_lower_bound(double a, double sigma, double beta) {
  const double c = variance_ceiling(a, beta);
  return 1.0 - 2.0 * sigma * sigma * c * c;
}

std::vector<double> Range::values() const {
  require(count >= 1, ErrorCode::kInvalidArgument, "range needs at least one point");
  if (count == 1) return {start};
  std::vector<double> out(count);
  const double h = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + h * static_cast<double>(i);
  out.back() = stop;
  return out;
}

Range parse_range(const std::string& text) {
  auto parse_double = [&](std::string_view s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    require(r.ec == std::errc() && r.ptr == s.data() + s.size(), ErrorCode::kInvalidArgument,
            "bad number in range '" + text + "'");
    return v;
  };
  const std::string_view view(text);
  const auto c1 = view.find(':');
  if (c1 == std::string_view::npos) {
    const double v = parse_double(view);
    return {v, v, 1};
  }
  const auto c2 = view.find(':', c1 + 1);
  require(c2 != std::string_view::npos, ErrorCode::kInvalidArgument,
          "range must be start:stop:count, got '" + text + "'");
  Range r;
  r.start = parse_double(view.substr(0, c1));
  r.stop = parse_double(view.substr(c1 + 1, c2 - c1 - 1));
  const auto n = view.substr(c2 + 1);
  std::size_t count = 0;
  const auto res = std::from_chars(n.data(), n.data() + n.size(), count);
  require(res.ec == std::errc() && res.ptr == n.data() + n.size() && count >= 1,
          ErrorCode::kInvalidArgument, "range count must be a positive integer in '" + text + "'");
  r.count = count;
  return r;
}

std::vector<FixedBeta> standard_beta_choices() { return {{1.0, 0.25, 0.75}, {2.0, 0.5, 1.0}}; }

RegionGrid region_scan(const Range& a_range, const Range& sigma_range, BetaMode mode,
                       unsigned workers, const std::vector<FixedBeta>& choices) {
  RegionGrid grid;
  grid.mode = mode;
  grid.a_values = a_range.values();
  grid.sigma_values = sigma_range.values();
  for (double a : grid.a_values) {
    require(a > 0.0, ErrorCode::kInvalidArgument, "a values must be positive");
  }
  const std::size_t ns = grid.sigma_values.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double ninf = -std::numeric_limits<double>::infinity();

  struct Row {
    std::vector<double> beta, lower;
  };
  const auto rows = parallel_map(grid.a_values.size(), workers, [&](std::size_t i) {
    const double a = grid.a_values[i];
    Row row{std::vector<double>(ns, nan), std::vector<double>(ns, ninf)};
    if (mode == BetaMode::kMinimal) {
      const double beta = minimal_beta(a).beta_min;
      if (beta <= 0.0 || beta >= 4.0 * a) return row;
      const double c = variance_ceiling(a, beta);
      for (std::size_t j = 0; j < ns; ++j) {
        const double s = grid.sigma_values[j];
        row.beta[j] = beta;
        row.lower[j] = 1.0 - 2.0 * s * s * c * c;
      }
      return row;
    }
    for (const auto& choice : choices) {
      if (a < choice.a_min || a > choice.a_max || choice.beta >= 4.0 * a) continue;
      const double c = variance_ceiling(a, choice.beta);
      for (std::size_t j = 0; j < ns; ++j) {
        const double s = grid.sigma_values[j];
        const double lb = 1.0 - 2.0 * s * s * c * c;
        if (lb > row.lower[j]) {
          row.lower[j] = lb;
          row.beta[j] = choice.beta;
        }
      }
    }
    return row;
  });

  grid.beta.reserve(rows.size() * ns);
  grid.lower_bound.reserve(rows.size() * ns);
  for (const auto& row : rows) {
    grid.beta.insert(grid.beta.end(), row.beta.begin(), row.beta.end());
    grid.lower_bound.insert(grid.lower_bound.end(), row.lower.begin(), row.lower.end());
  }
  grid.admissible.resize(grid.lower_bound.size());
  for (std::size_t k = 0; k < grid.lower_bound.size(); ++k) {
    grid.admissible[k] = !std::isnan(grid.beta[k]) && grid.lower_bound[k] > 0.0;
  }
  return grid;
}

double conformal_equation(double a, double beta) {
  require_ceiling(a, beta);
  const double l = 1.0 - std::log(std::tanh(std::sqrt((4.0 * a - beta) / 8.0)));
  const double c = 3.0 * a - 1.0;
  return c * c / 8.0 * l * l - 1.0;
}

RootPair solve_conformal_range(double tol) {
  require(tol >= 1e-14, ErrorCode::kInvalidArgument, "tol must be >= 1e-14");

  // beta = 1: walk up from a = 1/4 in decades of (a - 1/4) to the first
  // sign change, so the bracket holds the root nearest 1/4.
  const Real quarter = Real(1) / 4;
  Real lo = quarter + Real("1e-40");
  require(conformal_g(lo, 1) > 0, ErrorCode::kNumerical, "G(1/4+) should be positive");
  Real hi = lo;
  for (Real offset("1e-39"); offset <= Real("0.5"); offset *= 10) {
    hi = quarter + offset;
    if (conformal_g(hi, 1) <= 0) break;
    lo = hi;
  }
  const Real a0 = bisect_then_newton(lo, hi, 1, tol);

  // beta = 2: walk down from a = 1.
  Real top = 1;
  require(conformal_g(top, 2) > 0, ErrorCode::kNumerical, "G(1) should be positive");
  Real bottom = top;
  for (int k = 1; k <= 50; ++k) {
    bottom = 1 - Real(k) / 100;
    if (conformal_g(bottom, 2) <= 0) break;
    top = bottom;
  }
  const Real a1 = bisect_then_newton(bottom, top, 2, tol);

  RootPair out;
  out.a0 = static_cast<double>(a0);
  out.a1 = static_cast<double>(a1);
  out.kappa0 = static_cast<double>(2 / a1);
  out.kappa1 = static_cast<double>(2 / a0);
  out.residual0 = static_cast<double>(abs(conformal_g(a0, 1)));
  out.residual1 = static_cast<double>(abs(conformal_g(a1, 2)));
  out.a0_digits = digits(a0);
  out.a1_digits = digits(a1);
  out.kappa0_digits = digits(2 / a1);
  out.kappa1_digits = digits(2 / a0);
  require(out.residual0 < tol && out.residual1 < tol, ErrorCode::kNumerical,
          "conformal roots did not converge");
  return out;
}

void write_region_csv(const RegionGrid& grid, std::ostream& out) {
  io::CsvWriter csv(out, {"a", "sigma", "beta_min", "lower_bound", "admissible"});
  for (std::size_t i = 0; i < grid.a_values.size(); ++i) {
    for (std::size_t j = 0; j < grid.sigma_values.size(); ++j) {
      const auto k = grid.index(i, j);
      csv.field(grid.a_values[i]).field(grid.sigma_values[j]).field(grid.beta[k]);
      csv.field(grid.lower_bound[k]).field(static_cast<long long>(grid.admissible[k]));
      csv.end_row();
    }
  }
}

void write_roots_json(const RootPair& roots, std::ostream& out) {
  nlohmann::ordered_json j;
  j["a0"] = roots.a0;
  j["a1"] = roots.a1;
  j["kappa0"] = roots.kappa0;
  j["kappa1"] = roots.kappa1;
  j["residual0"] = roots.residual0;
  j["residual1"] = roots.residual1;
  j["a0_digits"] = roots.a0_digits;
  j["a1_digits"] = roots.a1_digits;
  j["kappa0_digits"] = roots.kappa0_digits;
  j["kappa1_digits"] = roots.kappa1_digits;
  out << j.dump(2) << '\n';
}

void write_beta_profile_json(const BetaProfile& profile, std::ostream& out) {
  nlohmann::ordered_json j;
  j["a"] = profile.a;
  j["beta_min"] = profile.beta_min;
  j["x_argmax"] = profile.x_argmax;
  j["taylor_floor"] = profile.taylor_floor;
  j["x_max"] = profile.x_max;
  out << j.dump(2) << '\n';
}

}  // namespace parafermion::bounds
