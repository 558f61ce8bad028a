#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parafermion/parafermion.h"

#ifndef PARAFERMION_FIXTURE_DIR
#define PARAFERMION_FIXTURE_DIR "tests/fixtures"
#endif

namespace {

struct Failure {
  pf_status status;
  std::string message;
};

void check(pf_status status) {
  if (status != PF_OK) throw Failure{status, pf_last_error()};
}

void invalid(const std::string& message) { throw Failure{PF_INVALID_ARGUMENT, message}; }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{PF_IO, "cannot write '" + path + "'"};
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

template <class Handle, class Free>
struct Owned {
  Handle* ptr = nullptr;
  Free free;
  ~Owned() {
    if (ptr) free(ptr);
  }
};

struct Options {
  double kappa = 4.0;
  double sigma = 0.0;
  double delta = 1e-3;
  double dt = 0.01;
  double duration = 1.0;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  std::size_t grid = 41;
  std::size_t max_len = 0;
  std::string domain = "flower";
  std::string out = "-";
  std::string format;
  double x = 1.0 / std::sqrt(2.0 + std::sqrt(2.0));
  double beta = 0.0;
  double a = 0.0;
  unsigned workers = 0;
  std::size_t stride = 1;
  std::size_t start = 0;
  std::string residuals;
  std::string a_range = "0.05:1.0:96";
  std::string sigma_range = "-1:1:96";
  std::string beta_mode = "minimal";
  double f0_re = 1.0;
  double f0_im = 0.0;
  double x_max = 20.0;
  std::string fixture = PARAFERMION_FIXTURE_DIR "/spiral_walk.txt";
  std::vector<int> only;
  std::size_t ks_paths = 2000;
  double tail_tol = 1e-3;
  double saw_sigma = 0.625;
  std::uint64_t verify_seed = 20240601;
};

void require_format(const std::string& command, const std::string& format,
                    std::initializer_list<const char*> allowed) {
  if (format.empty()) return;
  for (const char* f : allowed) {
    if (format == f) return;
  }
  invalid(command + " does not support --format " + format);
}

double a_from(const Options& o, const CLI::App& cmd) {
  if (cmd.count("--a") > 0) return o.a;
  if (!(o.kappa > 0.0)) invalid("--kappa must be positive");
  return 2.0 / o.kappa;
}

int run_flow(const Options& o) {
  require_format("flow", o.format, {"csv"});
  Owned<pf_curve, decltype(&pf_curve_free)> curve{nullptr, pf_curve_free};
  check(pf_curve_trace(o.seed, o.kappa, o.duration, o.dt, o.delta, o.stride, &curve.ptr));
  check(pf_curve_write_csv(curve.ptr, o.out.c_str()));
  double winding = 0.0;
  check(pf_curve_winding(curve.ptr, 0.0, 0.0, 0.0, &winding));
  std::cerr << "flow: " << pf_curve_size(curve.ptr) << " points, " << pf_curve_dropped(curve.ptr)
            << " dropped, winding about 0 = " << num(winding) << "\n";
  return 0;
}

int run_reverse(const Options& o) {
  require_format("reverse", o.format, {"csv"});
  Owned<pf_reverse_path, decltype(&pf_reverse_free)> path{nullptr, pf_reverse_free};
  check(pf_reverse_simulate(o.kappa, o.delta, o.duration, o.dt, o.seed, &path.ptr));
  check(pf_reverse_write_csv(path.ptr, o.out.c_str()));
  int passed = 0;
  double violation = 0.0;
  check(pf_reverse_sandwich(path.ptr, 1e-9, &passed, &violation));
  pf_reverse_state last{};
  check(pf_reverse_state_at(path.ptr, pf_reverse_size(path.ptr) - 1, &last));
  std::cerr << "reverse: " << pf_reverse_size(path.ptr) << " steps, T = " << num(last.T)
            << ", sandwich " << (passed ? "ok" : "violated") << " (" << num(violation) << ")\n";
  return passed ? 0 : PF_VERIFICATION_FAILED;
}

int run_f0(const Options& o) {
  require_format("f0", o.format, {"json", "csv"});
  pf_mc_config config;
  pf_mc_config_default(&config);
  config.paths = o.paths;
  config.dt = o.dt;
  config.delta = o.delta;
  config.tail_tol = o.tail_tol;
  config.seed = o.seed;
  config.workers = o.workers;
  pf_estimate est{};
  check(pf_estimate_f0(o.kappa, o.sigma, &config, &est));
  if (o.format == "csv") {
    std::string text = "kappa,sigma,nu,b,b_tilde,n,mean_re,mean_im,stderr,delta,dt,seed\n";
    const auto& p = est.params;
    text += num(p.kappa) + "," + num(p.sigma) + "," + num(p.nu) + "," + num(p.b) + "," +
            num(p.b_tilde) + "," + std::to_string(est.n) + "," + num(est.mean_re) + "," +
            num(est.mean_im) + "," + num(est.std_error) + "," + num(config.delta) + "," +
            num(config.dt) + "," + std::to_string(config.seed) + "\n";
    write_text(o.out, text);
  } else {
    check(pf_estimate_write_json(&est, &config, o.out.c_str()));
  }
  std::cerr << "f0: (" << num(est.mean_re) << ", " << num(est.mean_im) << ") +- "
            << num(est.std_error) << " from " << est.n << " paths, " << est.dropped
            << " dropped\n";
  return 0;
}

int run_predict(const Options& o) {
  require_format("predict", o.format, {"csv"});
  if (o.grid < 2) invalid("--grid must be at least 2");
  std::string text = "x,y,re,im,abs,mass\n";
  std::size_t points = 0;
  for (std::size_t i = 0; i < o.grid; ++i) {
    for (std::size_t j = 0; j < o.grid; ++j) {
      const double x = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(o.grid - 1);
      const double y = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(o.grid - 1);
      if (x * x + y * y >= 1.0) continue;
      double re = 0.0;
      double im = 0.0;
      double mass = 0.0;
      check(pf_predict_f(o.kappa, o.sigma, x, y, o.f0_re, o.f0_im, &re, &im));
      check(pf_total_mass(o.kappa, x, y, &mass));
      text += num(x) + "," + num(y) + "," + num(re) + "," + num(im) + "," +
              num(std::hypot(re, im)) + "," + num(mass) + "\n";
      ++points;
    }
  }
  write_text(o.out, text);
  std::cerr << "predict: " << points << " grid points inside the disk\n";
  return 0;
}

int run_bounds(const Options& o, const CLI::App& cmd) {
  require_format("bounds", o.format, {"json"});
  const double a = a_from(o, cmd);
  pf_beta_profile profile{};
  check(pf_minimal_beta(a, o.x_max, 1e-10, &profile));
  nlohmann::ordered_json j;
  j["a"] = profile.a;
  j["beta_min"] = profile.beta_min;
  j["x_argmax"] = profile.x_argmax;
  j["taylor_floor"] = profile.taylor_floor;
  j["x_max"] = profile.x_max;
  const bool has_beta = cmd.count("--beta") > 0;
  const double beta = has_beta ? o.beta : profile.beta_min;
  double ceiling = 0.0;
  if (has_beta || beta < 4.0 * a) {
    check(pf_variance_ceiling(a, beta, &ceiling));
    j["beta"] = beta;
    j["variance_ceiling"] = ceiling;
    if (cmd.count("--sigma") > 0) {
      double lower = 0.0;
      check(pf_nontriviality_lower_bound(a, o.sigma, beta, &lower));
      j["sigma"] = o.sigma;
      j["lower_bound"] = lower;
    }
  }
  write_text(o.out, j.dump(2) + "\n");
  std::cerr << "bounds: beta_min(" << num(a) << ") = " << num(profile.beta_min) << "\n";
  return 0;
}

int run_region(const Options& o) {
  require_format("region", o.format, {"csv"});
  pf_range a{};
  pf_range sigma{};
  check(pf_parse_range(o.a_range.c_str(), &a));
  check(pf_parse_range(o.sigma_range.c_str(), &sigma));
  if (o.beta_mode != "minimal" && o.beta_mode != "fixed") {
    invalid("--beta-mode must be minimal or fixed");
  }
  Owned<pf_region, decltype(&pf_region_free)> region{nullptr, pf_region_free};
  check(pf_region_scan(a, sigma, o.beta_mode == "fixed", o.workers, &region.ptr));
  check(pf_region_write_csv(region.ptr, o.out.c_str()));
  std::size_t admissible = 0;
  for (std::size_t i = 0; i < pf_region_rows(region.ptr); ++i) {
    for (std::size_t j = 0; j < pf_region_cols(region.ptr); ++j) {
      int ok = 0;
      check(pf_region_cell(region.ptr, i, j, nullptr, nullptr, nullptr, nullptr, &ok));
      admissible += static_cast<std::size_t>(ok);
    }
  }
  std::cerr << "region: " << admissible << " of " << pf_region_rows(region.ptr) * pf_region_cols(region.ptr)
            << " cells admissible\n";
  return 0;
}

int run_roots(const Options& o) {
  require_format("roots", o.format, {"json"});
  pf_root_pair roots{};
  check(pf_solve_conformal_range(o.tol, &roots));
  check(pf_roots_write_json(&roots, o.out.c_str()));
  std::cerr << "roots: a in (" << roots.a0_digits << ", " << roots.a1_digits << "), kappa in ("
            << roots.kappa0_digits << ", " << roots.kappa1_digits << ")\n";
  return 0;
}

int run_saw(const Options& o) {
  require_format("saw", o.format, {"csv"});
  Owned<pf_domain, decltype(&pf_domain_free)> domain{nullptr, pf_domain_free};
  check(pf_domain_load(o.domain.c_str(), &domain.ptr));
  int w = 0;
  check(pf_domain_boundary_mid_edge(domain.ptr, o.start, &w));
  Owned<pf_field, decltype(&pf_field_free)> field{nullptr, pf_field_free};
  check(pf_discrete_observable(domain.ptr, w, o.x, o.saw_sigma, o.max_len, &field.ptr));
  check(pf_field_write_csv(field.ptr, o.out.c_str()));
  if (!o.residuals.empty()) check(pf_residual_write_csv(field.ptr, o.residuals.c_str()));
  int truncated = 0;
  std::size_t walks = 0;
  double residual = 0.0;
  check(pf_field_info(field.ptr, &truncated, &walks));
  check(pf_field_max_residual(field.ptr, &residual));
  std::cerr << "saw: " << pf_domain_vertex_count(domain.ptr) << " vertices, "
            << pf_domain_mid_edge_count(domain.ptr) << " mid-edges, " << walks << " walks"
            << (truncated ? " (truncated by --max-len)" : "") << ", max local residual "
            << num(residual) << "\n";
  return 0;
}

int run_verify(const Options& o) {
  require_format("verify", o.format, {"json", "text"});
  pf_verify_options options;
  pf_verify_options_default(&options);
  options.seed = o.verify_seed;
  options.workers = o.workers;
  options.paths = o.paths;
  options.ks_paths = o.ks_paths;
  options.fixture_path = o.fixture.c_str();
  std::vector<int> ids = o.only;
  if (ids.empty()) {
    for (int id = 1; id <= pf_criterion_count(); ++id) ids.push_back(id);
  }
  int failed = 0;
  nlohmann::ordered_json results = nlohmann::ordered_json::array();
  std::string lines;
  for (int id : ids) {
    pf_criterion_result r{};
    check(pf_verify_criterion(id, &options, &r));
    failed += r.passed ? 0 : 1;
    char seconds[32];
    std::snprintf(seconds, sizeof seconds, "%.3g", r.seconds);
    const std::string line = std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) +
                             " " + r.name + ": " + r.detail + " (" + seconds + " s)";
    std::cerr << line << std::endl;
    lines += line + "\n";
    results.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed != 0},
                       {"detail", r.detail}, {"seconds", r.seconds}});
  }
  if (o.format == "json") {
    write_text(o.out, results.dump(2) + "\n");
  } else if (o.out != "-") {
    write_text(o.out, lines);
  }
  std::cerr << "verify: " << ids.size() - failed << " of " << ids.size() << " criteria passed\n";
  return failed == 0 ? 0 : PF_VERIFICATION_FAILED;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parafermionic observables for SLE: flows, Monte Carlo estimates, bounds and lattice walks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a TOML config file");
  std::string save_config;
  app.add_option("--save-config", save_config, "Write the options given on the command line to a TOML file")
      ->configurable(false);

  Options o;
  auto out_opts = [&](CLI::App* c, const std::string& formats) {
    c->add_option("--out", o.out, "Output path ('-' for stdout)")->capture_default_str();
    c->add_option("--format", o.format, "Output format: " + formats);
  };
  auto seed_opt = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  };
  auto workers_opt = [&](CLI::App* c) {
    c->add_option("--workers", o.workers, "Worker threads (0: all cores)")->capture_default_str();
  };

  auto* flow = app.add_subcommand("flow", "Trace an SLE curve by the inverse Loewner flow (CSV t,re,im)");
  flow->add_option("--kappa", o.kappa, "SLE parameter")->capture_default_str();
  flow->add_option("--duration", o.duration, "Capacity time")->capture_default_str();
  flow->add_option("--dt", o.dt, "Driving sample spacing")->capture_default_str();
  flow->add_option("--delta", o.delta, "Radial offset below the driving point")->capture_default_str();
  flow->add_option("--stride", o.stride, "Trace every stride-th sample")->capture_default_str();
  seed_opt(flow);
  out_opts(flow, "csv");

  auto* reverse = app.add_subcommand("reverse", "Simulate the reverse flow (CSV t,theta,r,T)");
  reverse->add_option("--kappa", o.kappa, "SLE parameter")->capture_default_str();
  reverse->add_option("--delta", o.delta, "Initial height")->capture_default_str();
  reverse->add_option("--duration", o.duration, "Time horizon")->capture_default_str();
  reverse->add_option("--dt", o.dt, "Maximum step")->capture_default_str();
  seed_opt(reverse);
  out_opts(reverse, "csv");

  auto* f0 = app.add_subcommand("f0", "Monte Carlo estimate of F(0) = E[exp(-2i sigma T_inf)]");
  f0->add_option("--kappa", o.kappa, "SLE parameter")->capture_default_str();
  f0->add_option("--sigma", o.sigma, "Spin")->capture_default_str();
  f0->add_option("--paths", o.paths, "Number of paths")->capture_default_str();
  f0->add_option("--dt", o.dt, "Maximum step")->capture_default_str();
  f0->add_option("--delta", o.delta, "Initial height")->capture_default_str();
  f0->add_option("--tol", o.tail_tol, "Tail tolerance on T_inf")->capture_default_str();
  seed_opt(f0);
  workers_opt(f0);
  out_opts(f0, "json (default), csv");

  auto* predict = app.add_subcommand("predict", "Closed-form F(z) on a grid over the disk (CSV)");
  predict->add_option("--kappa", o.kappa, "SLE parameter")->capture_default_str();
  predict->add_option("--sigma", o.sigma, "Spin")->capture_default_str();
  predict->add_option("--grid", o.grid, "Grid points per axis on [-1, 1]")->capture_default_str();
  predict->add_option("--f0-re", o.f0_re, "Re F(0)")->capture_default_str();
  predict->add_option("--f0-im", o.f0_im, "Im F(0)")->capture_default_str();
  out_opts(predict, "csv");

  auto* bounds = app.add_subcommand("bounds", "Minimal beta, variance ceiling and lower bound (JSON)");
  bounds->add_option("--kappa", o.kappa, "SLE parameter (a = 2/kappa)")->capture_default_str();
  bounds->add_option("--a", o.a, "a directly; overrides --kappa");
  bounds->add_option("--beta", o.beta, "beta for the ceiling (default: minimal beta)");
  bounds->add_option("--sigma", o.sigma, "Spin for the lower bound");
  bounds->add_option("--x-max", o.x_max, "Search range for the beta supremum")->capture_default_str();
  out_opts(bounds, "json");

  auto* region = app.add_subcommand("region", "Admissible (a, sigma) region (CSV)");
  region->add_option("--a", o.a_range, "a range start:stop:count")->capture_default_str();
  region->add_option("--sigma", o.sigma_range, "sigma range start:stop:count")->capture_default_str();
  region->add_option("--beta-mode", o.beta_mode, "minimal or fixed")->capture_default_str();
  workers_opt(region);
  out_opts(region, "csv");

  auto* roots = app.add_subcommand("roots", "Endpoints of the conformal-spin interval (JSON)");
  roots->add_option("--tol", o.tol, "Root tolerance (>= 1e-14)")->capture_default_str();
  out_opts(roots, "json");

  auto* saw = app.add_subcommand("saw", "Exact lattice observable on a hexagonal domain (CSV)");
  saw->add_option("--domain", o.domain, "Shape (cell, flower, block:W:H) or cell file")->capture_default_str();
  saw->add_option("--x", o.x, "Step weight")->capture_default_str();
  saw->add_option("--sigma", o.saw_sigma, "Spin")->capture_default_str();
  saw->add_option("--max-len", o.max_len, "Maximum vertices per walk (0: exhaustive)")->capture_default_str();
  saw->add_option("--start", o.start, "Index of the starting boundary mid-edge")->capture_default_str();
  saw->add_option("--residuals", o.residuals, "Also write per-vertex residuals to this CSV");
  out_opts(saw, "csv");

  auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");
  verify->add_option("--only", o.only, "Criterion ids to run (default: all)");
  verify->add_option("--paths", o.paths, "Monte Carlo paths")->capture_default_str();
  verify->add_option("--ks-paths", o.ks_paths, "Samples per side for the KS test")->capture_default_str();
  verify->add_option("--fixture", o.fixture, "Walk fixture")->capture_default_str();
  verify->add_option("--seed", o.verify_seed, "Master seed")->capture_default_str();
  workers_opt(verify);
  out_opts(verify, "text (default), json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!save_config.empty()) write_text(save_config, app.config_to_str(false, true));
    if (*flow) return run_flow(o);
    if (*reverse) return run_reverse(o);
    if (*f0) return run_f0(o);
    if (*predict) return run_predict(o);
    if (*bounds) return run_bounds(o, *bounds);
    if (*region) return run_region(o);
    if (*roots) return run_roots(o);
    if (*saw) return run_saw(o);
    if (*verify) return run_verify(o);
  } catch (const Failure& f) {
    std::cerr << "error: " << pf_status_name(f.status) << ": " << f.message << "\n";
    return static_cast<int>(f.status);
  }
  return 0;
}
