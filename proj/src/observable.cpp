#include "parafermion/observable.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "parafermion/error.hpp"
#include "parafermion/parallel.hpp"
#include "parafermion/reverse_flow.hpp"
#include "parafermion/stats.hpp"

namespace parafermion::observable {

namespace {

void require_in_disk(Complex z, const char* what) {
  require(std::abs(z) < 1.0, ErrorCode::kOutOfDomain, std::string(what) + ": |z| must be < 1");
}

}  // namespace

Exponents exponents_from(double kappa, double sigma) {
  require(kappa > 0.0, ErrorCode::kInvalidArgument, "kappa must be positive");
  Exponents e;
  e.kappa = kappa;
  e.a = 2.0 / kappa;
  e.sigma = sigma;
  e.nu = sigma * sigma / e.a;
  e.b = (3.0 * e.a - 1.0) / 2.0;
  e.b_tilde = 0.5 * (1.0 / e.a - 1.0) * e.b;
  return e;
}

double total_mass(Complex z, const Exponents& e) {
  require_in_disk(z, "total_mass");
  return std::pow(std::abs(1.0 - z), -2.0 * e.b) *
         std::pow(1.0 - std::norm(z), e.b - e.b_tilde);
}

MobiusAutomorphism::MobiusAutomorphism(Complex z)
    : z_(z), rotation_((1.0 - std::conj(z)) / (1.0 - z)) {
  require_in_disk(z, "mobius_fz");
}

Complex MobiusAutomorphism::operator()(Complex w) const {
  // Unfolded rotation: numerator and denominator agree bitwise at w = 1.
  return (1.0 - std::conj(z_)) * (w - z_) / ((1.0 - z_) * (1.0 - std::conj(z_) * w));
}

Complex MobiusAutomorphism::derivative(Complex w) const {
  const Complex d = 1.0 - std::conj(z_) * w;
  return rotation_ * (1.0 - std::norm(z_)) / (d * d);
}

Complex MobiusAutomorphism::inverse(Complex u) const {
  return (u + rotation_ * z_) / (rotation_ + std::conj(z_) * u);
}

Complex MobiusAutomorphism::inverse_derivative(Complex u) const {
  const Complex d = rotation_ + std::conj(z_) * u;
  return rotation_ * (1.0 - std::norm(z_)) / (d * d);
}

double MobiusAutomorphism::s0(double a) const {
  return std::log(std::abs(inverse_derivative(0.0))) / (2.0 * a);
}

MobiusAutomorphism mobius_fz(Complex z) { return MobiusAutomorphism(z); }

TInfinityBatch sample_T_infinity(double a, const McConfig& config) {
  require(config.paths >= 1, ErrorCode::kInvalidArgument, "need at least one path");
  auto samples = parallel_map(config.paths, config.workers, [&](std::size_t i) {
    reverse_flow::SimulationOptions opts;
    opts.path_index = i;
    opts.stiffness = config.stiffness;
    try {
      return std::optional<double>(reverse_flow::estimate_T_infinity(
                                       a, config.delta, config.dt, config.tail_tol, config.seed, opts)
                                       .value);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNumerical) throw;
      return std::optional<double>();
    }
  });
  TInfinityBatch batch;
  batch.values.reserve(samples.size());
  for (const auto& s : samples) {
    if (s) {
      batch.values.push_back(*s);
    } else {
      ++batch.dropped;
    }
  }
  return batch;
}

ObservableEstimate estimate_F0_from(const Exponents& e, std::span<const double> t_infinity) {
  require(!t_infinity.empty(), ErrorCode::kNumerical, "no T_infinity samples survived");
  std::vector<Complex> summands;
  summands.reserve(t_infinity.size());
  for (double t : t_infinity) summands.push_back(std::polar(1.0, -2.0 * e.sigma * t));
  const auto stats = complex_mean_stderr(summands);
  ObservableEstimate out;
  out.mean = stats.mean;
  out.std_error = stats.std_error;
  out.n = stats.n;
  out.params = e;
  return out;
}

ObservableEstimate estimate_F0(const Exponents& e, const McConfig& config) {
  const auto batch = sample_T_infinity(e.a, config);
  auto out = estimate_F0_from(e, batch.values);
  out.dropped = batch.dropped;
  return out;
}

Complex predicted_F(Complex z, const Exponents& e, Complex F0) {
  require_in_disk(z, "predicted_F");
  const Complex one_minus_z = 1.0 - z;
  const double modulus = std::pow(std::abs(one_minus_z), -2.0 * (e.b - e.sigma)) *
                         std::pow(1.0 - std::norm(z), e.interior_exponent());
  return modulus * std::pow(one_minus_z, -2.0 * e.sigma) * F0;
}

Complex covariance_transform(Complex F, Complex fprime_w, Complex fprime_z, const Exponents& e) {
  require(fprime_w != Complex(0.0, 0.0) && fprime_z != Complex(0.0, 0.0),
          ErrorCode::kInvalidArgument, "covariance_transform: derivatives must be nonzero");
  const double s = e.sigma;
  return std::pow(std::abs(fprime_z), s - e.b_tilde - e.nu) *
         std::pow(std::abs(fprime_w), -e.b - s) * std::pow(fprime_z, -s) *
         std::pow(fprime_w, s) * F;
}

std::vector<MappedWinding> mapped_winding_series(const loewner_flow::CurveSample& curve,
                                                 Complex z) {
  const MobiusAutomorphism fz(z);
  loewner_flow::CurveSample mapped = curve;
  for (auto& p : mapped.points) p = fz.inverse(p);

  // The outward normal at the root 1 has argument 0 in both domains.
  const auto lhs = loewner_flow::winding_about(mapped, z, 0.0);
  const auto w0 = loewner_flow::winding_about(curve, 0.0, 0.0);
  const double shift = std::arg(fz.inverse_derivative(0.0)) - std::arg(fz.inverse_derivative(1.0));

  std::vector<MappedWinding> out(curve.points.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].lhs = lhs[k];
    out[k].rhs = w0[k] + shift;
    out[k].gap = std::abs(out[k].lhs - out[k].rhs);
    out[k].tip_dist = std::abs(curve.points[k]);
    out[k].t = curve.times[k];
  }
  return out;
}

MappedWinding mapped_winding_check(const loewner_flow::CurveSample& curve, Complex z) {
  require(!curve.points.empty(), ErrorCode::kInvalidArgument, "empty curve");
  return mapped_winding_series(curve, z).back();
}

double holomorphy_residual(const Exponents& e, std::span<const Complex> grid) {
  if (grid.empty()) return 0.0;
  auto real_factor = [&](Complex z) {
    return (predicted_F(z, e, 1.0) * std::pow(1.0 - z, 2.0 * e.sigma)).real();
  };
  const double ref = real_factor(grid.front());
  double worst = 0.0;
  for (const auto& z : grid) worst = std::max(worst, std::abs(real_factor(z) - ref));
  return worst;
}

void write_estimate_json(const ObservableEstimate& estimate, const McConfig& config,
                         std::ostream& out) {
  nlohmann::ordered_json j;
  const auto& p = estimate.params;
  j["kappa"] = p.kappa;
  j["sigma"] = p.sigma;
  j["nu"] = p.nu;
  j["b"] = p.b;
  j["b_tilde"] = p.b_tilde;
  j["n"] = estimate.n;
  j["mean_re"] = estimate.mean.real() + 0.0;
  j["mean_im"] = estimate.mean.imag() + 0.0;
  j["stderr"] = estimate.std_error;
  j["delta"] = config.delta;
  j["dt"] = config.dt;
  j["seed"] = config.seed;
  out << j.dump(2) << '\n';
}

}  // namespace parafermion::observable
