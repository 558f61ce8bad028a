#include "parafermion/parafermion.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "parafermion/bounds.hpp"
#include "parafermion/discrete_saw.hpp"
#include "parafermion/error.hpp"
#include "parafermion/io.hpp"
#include "parafermion/loewner_flow.hpp"
#include "parafermion/observable.hpp"
#include "parafermion/reverse_flow.hpp"
#include "parafermion/verification.hpp"

using namespace parafermion;

struct pf_curve {
  loewner_flow::CurveSample curve;
};

struct pf_reverse_path {
  double a = 0.0;
  double delta = 0.0;
  std::vector<reverse_flow::ReverseState> states;
};

struct pf_region {
  bounds::RegionGrid grid;
};

struct pf_domain {
  std::shared_ptr<const discrete_saw::HexDomain> domain;
};

struct pf_field {
  std::shared_ptr<const discrete_saw::HexDomain> domain;
  discrete_saw::DiscreteField field;
};

namespace {

thread_local std::string last_error;

template <class Fn>
pf_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return PF_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<pf_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PF_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PF_INTERNAL;
  }
}

template <class T>
void require_ptr(const T* p, const char* name) {
  require(p != nullptr, ErrorCode::kInvalidArgument, std::string(name) + " must not be null");
}

std::string out_path(const char* path) { return path == nullptr ? std::string() : path; }

template <class Writer>
void write_to(const char* path, Writer&& writer) {
  std::ostringstream s;
  writer(s);
  io::write_text(out_path(path), s.str());
}

void copy_digits(char (&dst)[32], const std::string& src) {
  std::snprintf(dst, sizeof dst, "%s", src.c_str());
}

observable::McConfig to_core(const pf_mc_config& c) {
  observable::McConfig out;
  out.paths = c.paths;
  out.dt = c.dt;
  out.delta = c.delta;
  out.tail_tol = c.tail_tol;
  out.seed = c.seed;
  out.workers = c.workers;
  out.stiffness = c.stiffness;
  return out;
}

pf_exponents to_c(const observable::Exponents& e) {
  return {e.kappa, e.a, e.sigma, e.nu, e.b, e.b_tilde};
}

bounds::Range to_core(pf_range r) { return {r.start, r.stop, r.count}; }

}  // namespace

extern "C" {

const char* pf_last_error(void) { return last_error.c_str(); }

const char* pf_status_name(pf_status status) {
  switch (status) {
    case PF_OK: return "ok";
    case PF_INVALID_ARGUMENT: return "invalid argument";
    case PF_OUT_OF_DOMAIN: return "out of domain";
    case PF_NUMERICAL: return "numerical failure";
    case PF_UNDER_RESOLVED: return "under-resolved";
    case PF_IO: return "i/o error";
    case PF_VERIFICATION_FAILED: return "verification failed";
    case PF_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pf_version(void) { return "1.0.0"; }

pf_status pf_exponents_from(double kappa, double sigma, pf_exponents* out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = to_c(observable::exponents_from(kappa, sigma));
  });
}

pf_status pf_total_mass(double kappa, double z_re, double z_im, double* out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = observable::total_mass({z_re, z_im}, observable::exponents_from(kappa, 0.0));
  });
}

pf_status pf_predict_f(double kappa, double sigma, double z_re, double z_im, double f0_re,
                       double f0_im, double* out_re, double* out_im) {
  return guarded([&] {
    require_ptr(out_re, "out_re");
    require_ptr(out_im, "out_im");
    const auto f = observable::predicted_F({z_re, z_im}, observable::exponents_from(kappa, sigma),
                                           {f0_re, f0_im});
    *out_re = f.real();
    *out_im = f.imag();
  });
}

pf_status pf_holomorphy_residual(double kappa, double sigma, const double* z_re,
                                 const double* z_im, size_t n, double* out) {
  return guarded([&] {
    require_ptr(out, "out");
    require(n == 0 || (z_re && z_im), ErrorCode::kInvalidArgument, "grid must not be null");
    std::vector<std::complex<double>> grid(n);
    for (size_t i = 0; i < n; ++i) grid[i] = {z_re[i], z_im[i]};
    *out = observable::holomorphy_residual(observable::exponents_from(kappa, sigma), grid);
  });
}

pf_status pf_curve_trace(uint64_t seed, double kappa, double duration, double step, double delta,
                         size_t stride, pf_curve** out) {
  return guarded([&] {
    require_ptr(out, "out");
    const auto e = observable::exponents_from(kappa, 0.0);
    const auto path = loewner_flow::sample_driving_path(seed, duration, step);
    auto handle = std::make_unique<pf_curve>();
    handle->curve = loewner_flow::trace_curve(path, e.a, delta, stride);
    *out = handle.release();
  });
}

size_t pf_curve_size(const pf_curve* curve) { return curve ? curve->curve.points.size() : 0; }

size_t pf_curve_dropped(const pf_curve* curve) { return curve ? curve->curve.dropped : 0; }

pf_status pf_curve_point(const pf_curve* curve, size_t i, double* t, double* re, double* im) {
  return guarded([&] {
    require_ptr(curve, "curve");
    require(i < curve->curve.points.size(), ErrorCode::kInvalidArgument, "index out of range");
    if (t) *t = curve->curve.times[i];
    if (re) *re = curve->curve.points[i].real();
    if (im) *im = curve->curve.points[i].imag();
  });
}

pf_status pf_curve_winding(const pf_curve* curve, double z_re, double z_im, double normal_arg,
                           double* out) {
  return guarded([&] {
    require_ptr(curve, "curve");
    require_ptr(out, "out");
    require(!curve->curve.points.empty(), ErrorCode::kInvalidArgument, "empty curve");
    *out = loewner_flow::winding_about(curve->curve, {z_re, z_im}, normal_arg).back();
  });
}

pf_status pf_curve_write_csv(const pf_curve* curve, const char* path) {
  return guarded([&] {
    require_ptr(curve, "curve");
    write_to(path, [&](std::ostream& s) { loewner_flow::write_curve_csv(curve->curve, s); });
  });
}

void pf_curve_free(pf_curve* curve) { delete curve; }

pf_status pf_reverse_simulate(double kappa, double delta, double duration, double dt,
                              uint64_t seed, pf_reverse_path** out) {
  return guarded([&] {
    require_ptr(out, "out");
    const auto e = observable::exponents_from(kappa, 0.0);
    auto handle = std::make_unique<pf_reverse_path>();
    handle->a = e.a;
    handle->delta = delta;
    handle->states = reverse_flow::simulate_reverse_path(e.a, delta, duration, dt, seed);
    *out = handle.release();
  });
}

size_t pf_reverse_size(const pf_reverse_path* path) { return path ? path->states.size() : 0; }

pf_status pf_reverse_state_at(const pf_reverse_path* path, size_t i, pf_reverse_state* out) {
  return guarded([&] {
    require_ptr(path, "path");
    require_ptr(out, "out");
    require(i < path->states.size(), ErrorCode::kInvalidArgument, "index out of range");
    const auto& s = path->states[i];
    *out = {s.t, s.theta, s.r, s.b, s.T};
  });
}

pf_status pf_reverse_sandwich(const pf_reverse_path* path, double slack, int* passed,
                              double* max_violation) {
  return guarded([&] {
    require_ptr(path, "path");
    const auto report = reverse_flow::sandwich_check(path->states, path->a, path->delta, slack);
    if (passed) *passed = report.passed ? 1 : 0;
    if (max_violation) *max_violation = report.max_violation;
  });
}

pf_status pf_reverse_write_csv(const pf_reverse_path* path, const char* out_path_c) {
  return guarded([&] {
    require_ptr(path, "path");
    write_to(out_path_c, [&](std::ostream& s) { reverse_flow::write_path_csv(path->states, s); });
  });
}

void pf_reverse_free(pf_reverse_path* path) { delete path; }

void pf_mc_config_default(pf_mc_config* config) {
  if (!config) return;
  const observable::McConfig d;
  *config = {d.paths, d.dt, d.delta, d.tail_tol, d.seed, d.workers, d.stiffness};
}

pf_status pf_estimate_f0(double kappa, double sigma, const pf_mc_config* config,
                         pf_estimate* out) {
  return guarded([&] {
    require_ptr(config, "config");
    require_ptr(out, "out");
    const auto e = observable::exponents_from(kappa, sigma);
    const auto est = observable::estimate_F0(e, to_core(*config));
    *out = {est.mean.real(), est.mean.imag(), est.std_error, est.n, est.dropped, to_c(e)};
  });
}

pf_status pf_estimate_write_json(const pf_estimate* estimate, const pf_mc_config* config,
                                 const char* path) {
  return guarded([&] {
    require_ptr(estimate, "estimate");
    require_ptr(config, "config");
    observable::ObservableEstimate est;
    est.mean = {estimate->mean_re, estimate->mean_im};
    est.std_error = estimate->std_error;
    est.n = estimate->n;
    est.dropped = estimate->dropped;
    const auto& p = estimate->params;
    est.params = {p.kappa, p.a, p.sigma, p.nu, p.b, p.b_tilde};
    write_to(path, [&](std::ostream& s) { observable::write_estimate_json(est, to_core(*config), s); });
  });
}

pf_status pf_minimal_beta(double a, double x_max, double refine_tol, pf_beta_profile* out) {
  return guarded([&] {
    require_ptr(out, "out");
    const auto p = bounds::minimal_beta(a, x_max, refine_tol);
    *out = {p.a, p.beta_min, p.x_argmax, p.taylor_floor, p.x_max};
  });
}

pf_status pf_variance_ceiling(double a, double beta, double* out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = bounds::variance_ceiling(a, beta);
  });
}

pf_status pf_theta_variance_envelope(double a, double beta, double delta, double t, double* out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = bounds::theta_variance_envelope(a, beta, delta, t);
  });
}

pf_status pf_nontriviality_lower_bound(double a, double sigma, double beta, double* out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = bounds::nontriviality_lower_bound(a, sigma, beta);
  });
}

pf_status pf_parse_range(const char* text, pf_range* out) {
  return guarded([&] {
    require_ptr(text, "text");
    require_ptr(out, "out");
    const auto r = bounds::parse_range(text);
    *out = {r.start, r.stop, r.count};
  });
}

pf_status pf_region_scan(pf_range a, pf_range sigma, int fixed_beta, unsigned workers,
                         pf_region** out) {
  return guarded([&] {
    require_ptr(out, "out");
    auto handle = std::make_unique<pf_region>();
    handle->grid = bounds::region_scan(
        to_core(a), to_core(sigma), fixed_beta ? bounds::BetaMode::kFixed : bounds::BetaMode::kMinimal,
        workers);
    *out = handle.release();
  });
}

size_t pf_region_rows(const pf_region* region) { return region ? region->grid.a_values.size() : 0; }

size_t pf_region_cols(const pf_region* region) {
  return region ? region->grid.sigma_values.size() : 0;
}

pf_status pf_region_cell(const pf_region* region, size_t i, size_t j, double* a, double* sigma,
                         double* beta, double* lower_bound, int* admissible) {
  return guarded([&] {
    require_ptr(region, "region");
    const auto& g = region->grid;
    require(i < g.a_values.size() && j < g.sigma_values.size(), ErrorCode::kInvalidArgument,
            "cell index out of range");
    const auto k = g.index(i, j);
    if (a) *a = g.a_values[i];
    if (sigma) *sigma = g.sigma_values[j];
    if (beta) *beta = g.beta[k];
    if (lower_bound) *lower_bound = g.lower_bound[k];
    if (admissible) *admissible = g.admissible[k] ? 1 : 0;
  });
}

pf_status pf_region_write_csv(const pf_region* region, const char* path) {
  return guarded([&] {
    require_ptr(region, "region");
    write_to(path, [&](std::ostream& s) { bounds::write_region_csv(region->grid, s); });
  });
}

void pf_region_free(pf_region* region) { delete region; }

pf_status pf_solve_conformal_range(double tol, pf_root_pair* out) {
  return guarded([&] {
    require_ptr(out, "out");
    const auto r = bounds::solve_conformal_range(tol);
    *out = {};
    out->a0 = r.a0;
    out->a1 = r.a1;
    out->kappa0 = r.kappa0;
    out->kappa1 = r.kappa1;
    out->residual0 = r.residual0;
    out->residual1 = r.residual1;
    copy_digits(out->a0_digits, r.a0_digits);
    copy_digits(out->a1_digits, r.a1_digits);
    copy_digits(out->kappa0_digits, r.kappa0_digits);
    copy_digits(out->kappa1_digits, r.kappa1_digits);
  });
}

pf_status pf_roots_write_json(const pf_root_pair* roots, const char* path) {
  return guarded([&] {
    require_ptr(roots, "roots");
    bounds::RootPair r;
    r.a0 = roots->a0;
    r.a1 = roots->a1;
    r.kappa0 = roots->kappa0;
    r.kappa1 = roots->kappa1;
    r.residual0 = roots->residual0;
    r.residual1 = roots->residual1;
    r.a0_digits = roots->a0_digits;
    r.a1_digits = roots->a1_digits;
    r.kappa0_digits = roots->kappa0_digits;
    r.kappa1_digits = roots->kappa1_digits;
    write_to(path, [&](std::ostream& s) { bounds::write_roots_json(r, s); });
  });
}

pf_status pf_domain_load(const char* spec_or_path, pf_domain** out) {
  return guarded([&] {
    require_ptr(spec_or_path, "spec_or_path");
    require_ptr(out, "out");
    auto handle = std::make_unique<pf_domain>();
    handle->domain =
        std::make_shared<const discrete_saw::HexDomain>(discrete_saw::load_domain(spec_or_path));
    *out = handle.release();
  });
}

size_t pf_domain_vertex_count(const pf_domain* domain) {
  return domain ? domain->domain->vertices.size() : 0;
}

size_t pf_domain_mid_edge_count(const pf_domain* domain) {
  return domain ? domain->domain->mid_edges.size() : 0;
}

size_t pf_domain_boundary_count(const pf_domain* domain) {
  return domain ? domain->domain->boundary_mid_edges().size() : 0;
}

pf_status pf_domain_boundary_mid_edge(const pf_domain* domain, size_t k, int* out) {
  return guarded([&] {
    require_ptr(domain, "domain");
    require_ptr(out, "out");
    const auto b = domain->domain->boundary_mid_edges();
    require(k < b.size(), ErrorCode::kInvalidArgument, "boundary index out of range");
    *out = b[k];
  });
}

void pf_domain_free(pf_domain* domain) { delete domain; }

pf_status pf_saw_count(const pf_domain* domain, int w, size_t max_len, size_t* out) {
  return guarded([&] {
    require_ptr(domain, "domain");
    require_ptr(out, "out");
    size_t count = 0;
    if (max_len == 0) max_len = domain->domain->vertices.size();
    discrete_saw::for_each_saw(*domain->domain, w, max_len,
                               [&](const discrete_saw::SAWPath&) { ++count; });
    *out = count;
  });
}

pf_status pf_discrete_observable(const pf_domain* domain, int w, double x, double sigma,
                                 size_t max_len, pf_field** out) {
  return guarded([&] {
    require_ptr(domain, "domain");
    require_ptr(out, "out");
    auto handle = std::make_unique<pf_field>();
    handle->domain = domain->domain;
    handle->field = discrete_saw::discrete_observable(*domain->domain, w, x, sigma, max_len);
    *out = handle.release();
  });
}

pf_status pf_field_info(const pf_field* field, int* truncated, size_t* walks) {
  return guarded([&] {
    require_ptr(field, "field");
    if (truncated) *truncated = field->field.truncated ? 1 : 0;
    if (walks) *walks = field->field.walks;
  });
}

pf_status pf_field_value(const pf_field* field, int m, double* re, double* im,
                         double* unsigned_sum) {
  return guarded([&] {
    require_ptr(field, "field");
    require(m >= 0 && static_cast<size_t>(m) < field->field.values.size(),
            ErrorCode::kInvalidArgument, "mid-edge index out of range");
    if (re) *re = field->field.values[m].real();
    if (im) *im = field->field.values[m].imag();
    if (unsigned_sum) *unsigned_sum = field->field.unsigned_sums[m];
  });
}

pf_status pf_field_max_residual(const pf_field* field, double* out) {
  return guarded([&] {
    require_ptr(field, "field");
    require_ptr(out, "out");
    double worst = 0.0;
    for (size_t v = 0; v < field->domain->vertices.size(); ++v) {
      worst = std::max(worst, std::abs(discrete_saw::local_relation_residual(
                                  *field->domain, field->field, static_cast<int>(v))));
    }
    *out = worst;
  });
}

pf_status pf_field_write_csv(const pf_field* field, const char* path) {
  return guarded([&] {
    require_ptr(field, "field");
    write_to(path, [&](std::ostream& s) { discrete_saw::write_field_csv(*field->domain, field->field, s); });
  });
}

pf_status pf_residual_write_csv(const pf_field* field, const char* path) {
  return guarded([&] {
    require_ptr(field, "field");
    write_to(path, [&](std::ostream& s) {
      discrete_saw::write_residual_csv(*field->domain, field->field, s);
    });
  });
}

void pf_field_free(pf_field* field) { delete field; }

pf_status pf_fixture_turning(const char* fixture_path, double* by_turns, double* by_argument) {
  return guarded([&] {
    require_ptr(fixture_path, "fixture_path");
    const auto t = verification::fixture_turning(fixture_path);
    if (by_turns) *by_turns = t.by_turns;
    if (by_argument) *by_argument = t.by_argument;
  });
}

void pf_verify_options_default(pf_verify_options* options) {
  if (!options) return;
  const verification::VerifyOptions d;
  *options = {d.seed, d.workers, d.paths, d.ks_paths, nullptr};
}

int pf_criterion_count(void) { return verification::kCriterionCount; }

pf_status pf_verify_criterion(int id, const pf_verify_options* options, pf_criterion_result* out) {
  return guarded([&] {
    require_ptr(options, "options");
    require_ptr(out, "out");
    verification::VerifyOptions o;
    o.seed = options->seed;
    o.workers = options->workers;
    o.paths = options->paths;
    o.ks_paths = options->ks_paths;
    o.fixture_path = options->fixture_path ? options->fixture_path : "";
    const auto r = verification::run_criterion(id, o);
    *out = {};
    out->id = r.id;
    out->passed = r.passed ? 1 : 0;
    out->seconds = r.seconds;
    std::snprintf(out->name, sizeof out->name, "%s", r.name.c_str());
    std::snprintf(out->detail, sizeof out->detail, "%s", r.detail.c_str());
  });
}

}  // extern "C"
