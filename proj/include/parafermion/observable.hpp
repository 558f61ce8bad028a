#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "parafermion/loewner_flow.hpp"

namespace parafermion::observable {

using Complex = std::complex<double>;

// Parameter bundle for SLE_kappa with spin sigma:
//   a = 2/kappa, b = (3a - 1)/2, b_tilde = (1/a - 1) b / 2, nu = sigma^2 / a.
struct Exponents {
  double kappa = 0.0;
  double a = 0.0;
  double sigma = 0.0;
  double nu = 0.0;
  double b = 0.0;
  double b_tilde = 0.0;

  // Exponent of (1 - |z|^2) in F(z). Equals (b^2 - sigma^2) / a.
  double interior_exponent() const { return b - b_tilde - nu; }
};

Exponents exponents_from(double kappa, double sigma);

// C_D(1, z) = |1 - z|^{-2b} (1 - |z|^2)^{b - b_tilde}, normalized so C_D(1, 0) = 1.
double total_mass(Complex z, const Exponents& e);

// The disk automorphism f_z with f_z(z) = 0 and f_z(1) = 1:
//   f_z(w) = ((1 - conj z) / (1 - z)) (w - z) / (1 - conj(z) w).
class MobiusAutomorphism {
 public:
  explicit MobiusAutomorphism(Complex z);

  Complex z() const { return z_; }
  Complex operator()(Complex w) const;
  Complex derivative(Complex w) const;
  Complex inverse(Complex u) const;
  Complex inverse_derivative(Complex u) const;

  // Parametrization shift log|f'(0)| / (2a) for f = f_z^{-1}, the map carrying
  // the curve to 0 onto the curve to z.
  double s0(double a) const;

 private:
  Complex z_;
  Complex rotation_;  // (1 - conj z) / (1 - z)
};

MobiusAutomorphism mobius_fz(Complex z);

struct McConfig {
  std::size_t paths = 10000;
  double dt = 0.01;
  double delta = 1e-3;
  double tail_tol = 1e-3;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: hardware concurrency
  double stiffness = 0.05;
};

struct TInfinityBatch {
  std::vector<double> values;  // ordered by path index, dropped paths omitted
  std::size_t dropped = 0;
};

// T_infinity for paths 0..paths-1 of the master seed; deterministic for any
// worker count.
TInfinityBatch sample_T_infinity(double a, const McConfig& config);

struct ObservableEstimate {
  Complex mean;
  double std_error = 0.0;
  std::size_t n = 0;
  std::size_t dropped = 0;
  Exponents params;
};

// F(0) = E[exp(-2 i sigma T_infinity)] by Monte Carlo.
ObservableEstimate estimate_F0(const Exponents& e, const McConfig& config);
ObservableEstimate estimate_F0_from(const Exponents& e, std::span<const double> t_infinity);

// F(z) = |1-z|^{-2(b - sigma)} (1 - |z|^2)^{b - b_tilde - nu} (1-z)^{-2 sigma} F(0),
// principal branch for (1 - z)^{-2 sigma}.
Complex predicted_F(Complex z, const Exponents& e, Complex F0);

// F_{f(D)}(f(w), f(z)) from F_D(w, z) and the derivatives f'(w), f'(z).
Complex covariance_transform(Complex F, Complex fprime_w, Complex fprime_z, const Exponents& e);

struct MappedWinding {
  double lhs = 0.0;  // winding of f_z^{-1}(curve) about z
  double rhs = 0.0;  // W^0 + arg (f_z^{-1})'(0) - arg (f_z^{-1})'(1)
  double gap = 0.0;
  double tip_dist = 0.0;  // |gamma(t)|
  double t = 0.0;
};

// Every curve sample, in order.
std::vector<MappedWinding> mapped_winding_series(const loewner_flow::CurveSample& curve,
                                                 Complex z);
// Last curve sample only.
MappedWinding mapped_winding_check(const loewner_flow::CurveSample& curve, Complex z);

// Spread over the grid of the real factor |1-z|^{-2(b-sigma)} (1-|z|^2)^{b-b_tilde-nu},
// obtained as predicted_F(z, e, 1) (1 - z)^{2 sigma}. Zero iff that factor is
// constant on the grid.
double holomorphy_residual(const Exponents& e, std::span<const Complex> grid);

// {kappa, sigma, nu, b, b_tilde, n, mean_re, mean_im, stderr, delta, dt, seed}
void write_estimate_json(const ObservableEstimate& estimate, const McConfig& config,
                         std::ostream& out);

}  // namespace parafermion::observable
