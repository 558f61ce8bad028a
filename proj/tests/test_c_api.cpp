#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "parafermion/parafermion.h"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("status names and errors") {
  CHECK(std::string(pf_status_name(PF_OK)) == "ok");
  CHECK(std::string(pf_status_name(PF_INVALID_ARGUMENT)) == "invalid argument");
  CHECK(std::string(pf_version()) == "1.0.0");

  pf_exponents e{};
  CHECK(pf_exponents_from(0.0, 0.1, &e) == PF_INVALID_ARGUMENT);
  CHECK(std::string(pf_last_error()).size() > 0);
  CHECK(pf_exponents_from(2.0, 0.5, &e) == PF_OK);
  CHECK(std::string(pf_last_error()).empty());
  CHECK(e.b == 1.0);
  CHECK(pf_exponents_from(2.0, 0.5, nullptr) == PF_INVALID_ARGUMENT);

  double v = 0.0;
  CHECK(pf_total_mass(4.0, 1.0, 0.0, &v) == PF_OUT_OF_DOMAIN);
  CHECK(pf_variance_ceiling(0.25, 1.0, &v) == PF_INVALID_ARGUMENT);
  CHECK(std::string(pf_last_error()).find("4a") != std::string::npos);
}

TEST_CASE("closed forms through the C API") {
  double re = 0.0, im = 0.0;
  CHECK(pf_predict_f(2.0, 1.0, 0.0, 0.0, 0.7, 0.1, &re, &im) == PF_OK);
  CHECK(re == doctest::Approx(0.7));
  CHECK(im == doctest::Approx(0.1));
  const double zr[] = {0.0, 0.3, -0.2};
  const double zi[] = {0.0, 0.1, 0.4};
  double residual = 1.0;
  CHECK(pf_holomorphy_residual(2.0, 1.0, zr, zi, 3, &residual) == PF_OK);
  CHECK(residual < 1e-12);

  pf_beta_profile p{};
  CHECK(pf_minimal_beta(0.25, 20.0, 1e-10, &p) == PF_OK);
  CHECK(p.beta_min == doctest::Approx(1.0));
  double c = 0.0;
  CHECK(pf_variance_ceiling(0.5, 1.0, &c) == PF_OK);
  CHECK(c == doctest::Approx(1.04010664851));

  pf_root_pair roots{};
  CHECK(pf_solve_conformal_range(1e-12, &roots) == PF_OK);
  CHECK(std::string(roots.a0_digits).rfind("0.2500000022", 0) == 0);
  CHECK(std::string(roots.kappa1_digits).rfind("7.9999999295", 0) == 0);
}

TEST_CASE("handles") {
  pf_curve* curve = nullptr;
  CHECK(pf_curve_trace(1, 4.0, 0.5, 0.01, 1e-3, 5, &curve) == PF_OK);
  REQUIRE(curve != nullptr);
  CHECK(pf_curve_size(curve) == 11);
  double t = 0.0, re = 0.0, im = 0.0;
  CHECK(pf_curve_point(curve, 0, &t, &re, &im) == PF_OK);
  CHECK(pf_curve_point(curve, 99, &t, &re, &im) == PF_INVALID_ARGUMENT);
  CHECK(pf_curve_write_csv(curve, "c_api_curve.csv") == PF_OK);
  CHECK(slurp("c_api_curve.csv").rfind("t,re,im\n", 0) == 0);
  std::remove("c_api_curve.csv");
  CHECK(pf_curve_write_csv(curve, "/nonexistent/dir/x.csv") == PF_IO);
  pf_curve_free(curve);
  pf_curve_free(nullptr);

  pf_reverse_path* path = nullptr;
  CHECK(pf_reverse_simulate(4.0, 0.01, 1.0, 0.01, 3, &path) == PF_OK);
  int passed = 0;
  double violation = 1.0;
  CHECK(pf_reverse_sandwich(path, 1e-10, &passed, &violation) == PF_OK);
  CHECK(passed == 1);
  pf_reverse_state s{};
  CHECK(pf_reverse_state_at(path, 0, &s) == PF_OK);
  CHECK(s.r == 0.01);
  CHECK(pf_reverse_state_at(path, pf_reverse_size(path), &s) == PF_INVALID_ARGUMENT);
  pf_reverse_free(path);
  CHECK(pf_reverse_simulate(4.0, -1.0, 1.0, 0.01, 3, &path) == PF_INVALID_ARGUMENT);

  pf_mc_config config;
  pf_mc_config_default(&config);
  config.paths = 20;
  pf_estimate est{};
  CHECK(pf_estimate_f0(4.0, 0.0, &config, &est) == PF_OK);
  CHECK(est.mean_re == 1.0);
  CHECK(est.mean_im == 0.0);
  CHECK(est.n == 20);

  pf_range a{}, sigma{};
  CHECK(pf_parse_range("0.3:0.9:4", &a) == PF_OK);
  CHECK(pf_parse_range("0", &sigma) == PF_OK);
  CHECK(pf_parse_range("1:2", &sigma) == PF_INVALID_ARGUMENT);
  CHECK(pf_parse_range("0", &sigma) == PF_OK);
  pf_region* region = nullptr;
  CHECK(pf_region_scan(a, sigma, 0, 1, &region) == PF_OK);
  CHECK(pf_region_rows(region) == 4);
  CHECK(pf_region_cols(region) == 1);
  int ok = 0;
  double lb = 0.0;
  CHECK(pf_region_cell(region, 1, 0, nullptr, nullptr, nullptr, &lb, &ok) == PF_OK);
  CHECK(ok == 1);
  CHECK(lb == 1.0);
  CHECK(pf_region_cell(region, 4, 0, nullptr, nullptr, nullptr, &lb, &ok) == PF_INVALID_ARGUMENT);
  pf_region_free(region);

  pf_domain* domain = nullptr;
  CHECK(pf_domain_load("flower", &domain) == PF_OK);
  CHECK(pf_domain_vertex_count(domain) == 24);
  CHECK(pf_domain_mid_edge_count(domain) == 42);
  CHECK(pf_domain_boundary_count(domain) == 12);
  int w = -1;
  CHECK(pf_domain_boundary_mid_edge(domain, 0, &w) == PF_OK);
  CHECK(pf_domain_boundary_mid_edge(domain, 12, &w) == PF_INVALID_ARGUMENT);
  CHECK(pf_domain_boundary_mid_edge(domain, 0, &w) == PF_OK);
  size_t count = 0;
  CHECK(pf_saw_count(domain, w, 0, &count) == PF_OK);
  CHECK(count == 3075);
  CHECK(pf_saw_count(domain, w, 1, &count) == PF_OK);
  CHECK(count == 3);
  pf_field* field = nullptr;
  CHECK(pf_discrete_observable(domain, w, 1.0 / std::sqrt(2.0 + std::sqrt(2.0)), 0.625, 0, &field) ==
        PF_OK);
  pf_domain_free(domain);  // the field keeps its own reference
  double worst = 1.0;
  CHECK(pf_field_max_residual(field, &worst) == PF_OK);
  CHECK(worst < 1e-12);
  int truncated = 1;
  size_t walks = 0;
  CHECK(pf_field_info(field, &truncated, &walks) == PF_OK);
  CHECK(truncated == 0);
  CHECK(walks == 3075);
  double fr = 0.0, fi = 0.0, us = 0.0;
  CHECK(pf_field_value(field, w, &fr, &fi, &us) == PF_OK);
  CHECK(fr == 1.0);
  CHECK(pf_field_value(field, 1000, &fr, &fi, &us) == PF_INVALID_ARGUMENT);
  pf_field_free(field);
  CHECK(pf_domain_load("no-such-shape", &domain) == PF_INVALID_ARGUMENT);

  double by_turns = 0.0, by_arg = 0.0;
  CHECK(pf_fixture_turning(PARAFERMION_FIXTURE_DIR "/spiral_walk.txt", &by_turns, &by_arg) == PF_OK);
  CHECK(by_turns == doctest::Approx(-7.0 * M_PI / 3.0));
  CHECK(pf_fixture_turning("missing.txt", &by_turns, &by_arg) == PF_IO);
}

TEST_CASE("verification entry point") {
  CHECK(pf_criterion_count() == 11);
  pf_verify_options options;
  pf_verify_options_default(&options);
  options.fixture_path = PARAFERMION_FIXTURE_DIR "/spiral_walk.txt";
  pf_criterion_result r{};
  CHECK(pf_verify_criterion(1, &options, &r) == PF_OK);
  CHECK(r.id == 1);
  CHECK(r.passed == 1);
  CHECK(pf_verify_criterion(11, &options, &r) == PF_OK);
  CHECK(r.passed == 1);
  CHECK(pf_verify_criterion(12, &options, &r) == PF_INVALID_ARGUMENT);
}
