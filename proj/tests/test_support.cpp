#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "parafermion/error.hpp"
#include "parafermion/io.hpp"
#include "parafermion/parallel.hpp"
#include "parafermion/random.hpp"
#include "parafermion/stats.hpp"

using namespace parafermion;

namespace {

// sup |F1 - F2| over every sample point, quadratic but obvious.
double brute_ks(const std::vector<double>& x, const std::vector<double>& y) {
  double d = 0.0;
  std::vector<double> all = x;
  all.insert(all.end(), y.begin(), y.end());
  for (double t : all) {
    const double fx = std::count_if(x.begin(), x.end(), [&](double v) { return v <= t; }) /
                      static_cast<double>(x.size());
    const double fy = std::count_if(y.begin(), y.end(), [&](double v) { return v <= t; }) /
                      static_cast<double>(y.size());
    d = std::max(d, std::abs(fx - fy));
  }
  return d;
}

}  // namespace

TEST_CASE("mean and standard error") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const MeanStderr m = mean_stderr(v);
  CHECK(m.mean == 2.5);
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(m.n == 4);

  const std::vector<std::complex<double>> c{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  const ComplexMeanStderr cm = complex_mean_stderr(c);
  CHECK(std::abs(cm.mean) < 1e-15);
  CHECK(cm.std_error == doctest::Approx(std::sqrt((2.0 / 3.0 + 2.0 / 3.0) / 4.0)));
}

TEST_CASE("Kolmogorov distribution") {
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967).epsilon(1e-7));
  CHECK(kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_q(5.0) < 1e-20);
}

TEST_CASE("two-sample KS") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> x(300), y(200), z(250);
  for (auto& v : x) v = n01(rng);
  for (auto& v : y) v = n01(rng);
  for (auto& v : z) v = n01(rng) + 0.5;

  const KsResult same = ks_two_sample(x, y);
  CHECK(same.statistic == doctest::Approx(brute_ks(x, y)).epsilon(1e-15));
  CHECK(same.effective_n == doctest::Approx(120.0));
  const double en = std::sqrt(120.0);
  CHECK(same.p_value == doctest::Approx(kolmogorov_q((en + 0.12 + 0.11 / en) * same.statistic)));
  CHECK(same.p_value > 0.01);

  const KsResult shifted = ks_two_sample(x, z);
  CHECK(shifted.statistic == doctest::Approx(brute_ks(x, z)).epsilon(1e-15));
  CHECK(shifted.p_value < 1e-4);

  // Ties are handled by stepping past equal values together.
  const std::vector<double> a{0.0, 0.0, 1.0, 1.0};
  CHECK(ks_two_sample(a, a).statistic == 0.0);

  CHECK_THROWS_AS(ks_two_sample(std::vector<double>{}, x), Error);
}

TEST_CASE("format_double round-trips") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(-0.0) == "0");
  CHECK(io::format_double(1e-300) == "1e-300");
  CHECK(io::format_double(std::nan("")) == "nan");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng);
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("csv writer") {
  std::ostringstream out;
  io::CsvWriter w(out, {"a", "b", "c"});
  w.field(1.5).field(2LL).field("x");
  w.end_row();
  CHECK(out.str() == "a,b,c\n1.5,2,x\n");
}

TEST_CASE("path streams and parallel map") {
  PathStream a(7, 3);
  PathStream b(7, 3);
  PathStream c(7, 4);
  const double first = a.normal();
  CHECK(first == b.normal());
  CHECK(first != c.normal());

  auto f = [](std::size_t i) {
    PathStream s(11, i);
    return s.normal();
  };
  const auto one = parallel_map(200, 1, f);
  const auto four = parallel_map(200, 4, f);
  CHECK(one == four);
  CHECK_THROWS_AS(parallel_map(10, 3, [](std::size_t i) -> int {
                    if (i == 5) fail(ErrorCode::kNumerical, "boom");
                    return 0;
                  }),
                  Error);
}
