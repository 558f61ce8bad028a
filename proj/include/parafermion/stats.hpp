#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace parafermion {

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Sample mean and standard error of the mean (unbiased variance).
MeanStderr mean_stderr(std::span<const double> values);

struct ComplexMeanStderr {
  std::complex<double> mean;
  // sqrt(var(re) + var(im)) / sqrt(n)
  double std_error = 0.0;
  std::size_t n = 0;
};

ComplexMeanStderr complex_mean_stderr(std::span<const std::complex<double>> values);

struct KsResult {
  double statistic = 0.0;  // sup |F1 - F2|
  double p_value = 1.0;
  double effective_n = 0.0;
};

// Complementary CDF of the Kolmogorov distribution,
// Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

// Two-sided two-sample Kolmogorov-Smirnov test with the asymptotic p-value
// (Stephens' small-sample correction on the effective size).
KsResult ks_two_sample(std::span<const double> first, std::span<const double> second);

}  // namespace parafermion
