#include "parafermion/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "parafermion/error.hpp"

namespace parafermion {

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double var = ss / static_cast<double>(out.n - 1);
  out.std_error = std::sqrt(var / static_cast<double>(out.n));
  return out;
}

ComplexMeanStderr complex_mean_stderr(std::span<const std::complex<double>> values) {
  ComplexMeanStderr out;
  out.n = values.size();
  if (values.empty()) return out;
  std::complex<double> sum{0.0, 0.0};
  for (const auto& v : values) sum += v;
  const double n = static_cast<double>(out.n);
  out.mean = sum / n;
  if (out.n < 2) return out;
  double ss = 0.0;
  for (const auto& v : values) ss += std::norm(v - out.mean);
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Theta-function form; converges fast for small lambda.
    const double pi = std::numbers::pi;
    const double y = std::exp(-pi * pi / (8.0 * lambda * lambda));
    const double y8 = std::pow(y, 8.0);
    const double cdf = std::sqrt(2.0 * pi) / lambda *
                       (y + std::pow(y, 9.0) + std::pow(y, 25.0) + std::pow(y, 49.0) +
                        std::pow(y8, 8.0) * std::pow(y, 17.0));
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> first, std::span<const double> second) {
  require(!first.empty() && !second.empty(), ErrorCode::kInvalidArgument,
          "ks_two_sample: both samples must be non-empty");
  std::vector<double> x(first.begin(), first.end());
  std::vector<double> y(second.begin(), second.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());

  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }

  KsResult out;
  out.statistic = d;
  out.effective_n = nx * ny / (nx + ny);
  const double en = std::sqrt(out.effective_n);
  out.p_value = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
  return out;
}

}  // namespace parafermion
