// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#include <crmod/crmod.h>

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <utility>

#include "experiments.hpp"
#include "family_io.hpp"
#include "geodesics.hpp"
#include "lattice.hpp"
#include "modulus.hpp"
#include "qc_maps.hpp"

struct crmod_lattice {
  crmod::Lattice impl;
};
struct crmod_family {
  crmod::CurveFamily impl;
};
struct crmod_result {
  crmod::ModulusResult impl;
};
struct crmod_map {
  crmod::ContactMap impl;
};

namespace {

thread_local std::string g_last_error;

crmod_status record(crmod_status s, const char* what) {
  g_last_error = what;
  return s;
}

crmod_status ok() {
  g_last_error.clear();
  return CRMOD_OK;
}

// Runs body and maps exceptions onto status codes.
template <class F>
crmod_status guarded(F&& body) {
  try {
    body();
    return ok();
  } catch (const crmod::Error& e) {
    return record(static_cast<crmod_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return record(CRMOD_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(CRMOD_INTERNAL, e.what());
  } catch (...) {
    return record(CRMOD_INTERNAL, "unknown exception");
  }
}

crmod::HeisPoint to_cpp(crmod_point p) { return {p.x, p.y, p.t}; }
crmod_point to_c(const crmod::HeisPoint& p) { return {p.x, p.y, p.t}; }

crmod::GroupWord word_of(const int64_t w[3]) { return {w[0], w[1], w[2]}; }

void need(const void* p, const char* what) {
  crmod::require(p != nullptr, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

crmod::ExperimentConfig parse_config(const char* json) {
  if (!json || !*json) return {};
  crmod::ordered_json j;
  try {
    j = crmod::ordered_json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    crmod::fail(crmod::ErrorCode::Parse, std::string("config: ") + e.what());
  }
  return crmod::config_from_json(j);
}

crmod::OracleBudget budget_of(const crmod_oracle_budget* b) {
  crmod::OracleBudget o;
  if (b) {
    o.steps = b->steps;
    o.restarts = b->restarts;
    o.max_sweeps = b->max_sweeps;
    o.initial_step = b->initial_step;
    o.min_step = b->min_step;
    o.endpoint_tol = b->endpoint_tol;
    o.seed = b->seed;
  }
  return o;
}

}  // namespace

extern "C" {

const char* crmod_version(void) { return "1.0.0"; }

const char* crmod_status_string(crmod_status s) {
  switch (s) {
    case CRMOD_OK: return "ok";
    case CRMOD_INVALID_ARGUMENT: return "invalid argument";
    case CRMOD_NON_LEGENDRIAN: return "curve is not Legendrian";
    case CRMOD_OUT_OF_DOMAIN: return "out of domain";
    case CRMOD_BUDGET_EXHAUSTED: return "budget exhausted";
    case CRMOD_NOT_CONTACT: return "map is not contact";
    case CRMOD_DEGENERATE: return "degenerate differential";
    case CRMOD_ORIENTATION_REVERSED: return "orientation reversed";
    case CRMOD_INFEASIBLE: return "infeasible";
    case CRMOD_NOT_CONVERGED: return "not converged";
    case CRMOD_IO: return "i/o error";
    case CRMOD_PARSE: return "parse error";
    case CRMOD_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* crmod_last_error(void) { return g_last_error.c_str(); }

crmod_point crmod_group_mul(crmod_point p, crmod_point q) {
  return to_c(crmod::group_mul(to_cpp(p), to_cpp(q)));
}

crmod_point crmod_group_inv(crmod_point p) { return to_c(crmod::group_inv(to_cpp(p))); }

crmod_status crmod_cc_distance(crmod_point p, crmod_point q, double* out) {
  return guarded([&] {
    need(out, "out");
    crmod::require(to_cpp(p).finite() && to_cpp(q).finite(), "cc_distance: non-finite point");
    *out = crmod::cc_distance(to_cpp(p), to_cpp(q));
  });
}

crmod_status crmod_cc_distance_scaled(double K, crmod_point p, crmod_point q, double* out) {
  return guarded([&] {
    need(out, "out");
    crmod::require(to_cpp(p).finite() && to_cpp(q).finite(), "cc_distance: non-finite point");
    *out = crmod::cc_distance_scaled(crmod::MetricK(K), to_cpp(p), to_cpp(q));
  });
}

crmod_oracle_budget crmod_oracle_default_budget(void) {
  const crmod::OracleBudget b;
  return {b.steps, b.restarts, b.max_sweeps, b.initial_step, b.min_step, b.endpoint_tol, b.seed};
}

crmod_status crmod_brute_force_distance(crmod_point p, crmod_point q,
                                        const crmod_oracle_budget* budget, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = crmod::brute_force_distance(to_cpp(p), to_cpp(q), budget_of(budget));
  });
}

crmod_status crmod_geodesic(crmod_point p, crmod_point q, int n, crmod_point* path,
                            double* length, double* turning_angle) {
  return guarded([&] {
    const crmod::GeodesicSolution g = crmod::geodesic(to_cpp(p), to_cpp(q), n);
    if (path) {
      const auto s = g.path.samples();
      for (std::size_t i = 0; i < s.size() && i < static_cast<std::size_t>(n); ++i)
        path[i] = to_c(s[i].point);
    }
    if (length) *length = g.length;
    if (turning_angle) *turning_angle = g.turning_angle;
  });
}

crmod_status crmod_lattice_create(double sigma, double tau, crmod_lattice** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = new crmod_lattice{crmod::Lattice(sigma, tau)};
  });
}

void crmod_lattice_destroy(crmod_lattice* lat) { delete lat; }

double crmod_lattice_volume(const crmod_lattice* lat) { return lat ? lat->impl.volume() : 0.0; }

int64_t crmod_lattice_commutator_power(const crmod_lattice* lat) {
  return lat ? lat->impl.commutator_power() : 0;
}

crmod_status crmod_lattice_reduce(const crmod_lattice* lat, crmod_point p, crmod_point* rep,
                                  int64_t word[3]) {
  return guarded([&] {
    need(lat, "lattice");
    const crmod::QuotientPoint r = lat->impl.reduce(to_cpp(p));
    if (rep) *rep = to_c(r.rep);
    if (word) {
      word[0] = r.word.n1;
      word[1] = r.word.n2;
      word[2] = r.word.m;
    }
  });
}

crmod_status crmod_lattice_act(const crmod_lattice* lat, const int64_t word[3], crmod_point p,
                               crmod_point* out) {
  return guarded([&] {
    need(lat, "lattice");
    need(word, "word");
    need(out, "out");
    *out = to_c(lat->impl.act(word_of(word), to_cpp(p)));
  });
}

crmod_status crmod_quotient_distance(const crmod_lattice* lat, crmod_point p, crmod_point q,
                                     int radius, double* out, int64_t word[3],
                                     int* touches_boundary) {
  return guarded([&] {
    need(lat, "lattice");
    need(out, "out");
    const auto P = lat->impl.reduce(to_cpp(p));
    const auto Q = lat->impl.reduce(to_cpp(q));
    const crmod::QuotientDistance d = crmod::quotient_distance(lat->impl, P, Q, radius);
    *out = d.distance;
    if (word) {
      word[0] = d.word.n1;
      word[1] = d.word.n2;
      word[2] = d.word.m;
    }
    if (touches_boundary) *touches_boundary = d.touches_boundary ? 1 : 0;
  });
}

crmod_status crmod_homotopy_min_length(const crmod_lattice* lat, crmod_point p, crmod_point q,
                                       const int64_t cls[3], double K, double* out) {
  return guarded([&] {
    need(lat, "lattice");
    need(cls, "cls");
    need(out, "out");
    const auto P = lat->impl.reduce(to_cpp(p));
    const auto Q = lat->impl.reduce(to_cpp(q));
    *out = crmod::homotopy_min_length(lat->impl, P, Q, word_of(cls), crmod::MetricK(K));
  });
}

crmod_status crmod_family_x_lines(const crmod_lattice* lat, double a, int m, int n,
                                  crmod_family** out) {
  return guarded([&] {
    need(lat, "lattice");
    need(out, "out");
    *out = nullptr;
    *out = new crmod_family{crmod::family_X_lines(lat->impl, a, m, n)};
  });
}

crmod_status crmod_family_create(crmod_family** out) {
  return guarded([&] {
    need(out, "out");
    *out = new crmod_family{};
  });
}

crmod_status crmod_family_push(const crmod_lattice* lat, crmod_family* fam, const double* samples,
                               size_t n_samples) {
  return guarded([&] {
    need(lat, "lattice");
    need(fam, "family");
    crmod::require(samples != nullptr || n_samples == 0, "samples must not be NULL");
    std::vector<crmod::CurveSample> s(n_samples);
    for (size_t i = 0; i < n_samples; ++i)
      s[i] = {samples[4 * i], {samples[4 * i + 1], samples[4 * i + 2], samples[4 * i + 3]}};
    fam->impl.curves.push_back(
        crmod::canonical_lift(lat->impl, crmod::LegendrianPolyline(std::move(s))));
  });
}

size_t crmod_family_size(const crmod_family* fam) { return fam ? fam->impl.size() : 0; }

crmod_status crmod_family_save(const crmod_lattice* lat, const crmod_family* fam,
                               const char* path) {
  return guarded([&] {
    need(lat, "lattice");
    need(fam, "family");
    need(path, "path");
    crmod::save_family(path, lat->impl, fam->impl);
  });
}

crmod_status crmod_family_load(const char* path, crmod_lattice** lat, crmod_family** fam) {
  return guarded([&] {
    need(path, "path");
    need(lat, "lattice out");
    need(fam, "family out");
    *lat = nullptr;
    *fam = nullptr;
    crmod::FamilyDocument doc = crmod::load_family(path);
    auto l = std::make_unique<crmod_lattice>(crmod_lattice{doc.lattice});
    auto f = std::make_unique<crmod_family>(crmod_family{std::move(doc.family)});
    *lat = l.release();
    *fam = f.release();
  });
}

void crmod_family_destroy(crmod_family* fam) { delete fam; }

crmod_solve_options crmod_solve_default_options(void) {
  const crmod::SolveOptions o;
  return {32, 32, 32, 1.0, o.tol, o.max_iter};
}

crmod_status crmod_solve_modulus(const crmod_lattice* lat, const crmod_family* fam,
                                 const crmod_solve_options* opts, crmod_result** out) {
  return guarded([&] {
    need(lat, "lattice");
    need(fam, "family");
    need(out, "out");
    *out = nullptr;
    const crmod_solve_options o = opts ? *opts : crmod_solve_default_options();
    const crmod::Grid g = crmod::Grid::over(lat->impl, o.nx, o.ny, o.nt);
    const crmod::ConstraintMatrix L =
        crmod::assemble_constraints(fam->impl, lat->impl, g, crmod::MetricK(o.K));
    try {
      *out = new crmod_result{crmod::solve_modulus(L, g, {o.tol, o.max_iter})};
    } catch (const crmod::NotConvergedError& e) {
      *out = new crmod_result{e.best()};
      throw;
    }
  });
}

double crmod_result_value(const crmod_result* r) { return r ? r->impl.value : 0.0; }
double crmod_result_dual_bound(const crmod_result* r) { return r ? r->impl.dual_bound : 0.0; }
double crmod_result_gap(const crmod_result* r) { return r ? r->impl.gap : 0.0; }
int64_t crmod_result_iterations(const crmod_result* r) { return r ? r->impl.iterations : 0; }
size_t crmod_result_density_size(const crmod_result* r) { return r ? r->impl.density.size() : 0; }
const double* crmod_result_density(const crmod_result* r) {
  return r && !r->impl.density.empty() ? r->impl.density.data() : nullptr;
}
int crmod_result_non_rectifiable(const crmod_result* r) {
  return r && r->impl.non_rectifiable_members ? 1 : 0;
}

crmod_status crmod_result_to_json(const crmod_result* r, int with_density, char** json) {
  return guarded([&] {
    need(r, "result");
    need(json, "json");
    *json = dup_string(crmod::result_to_json(r->impl, with_density != 0).dump());
  });
}

void crmod_result_destroy(crmod_result* r) { delete r; }

double crmod_analytic_modulus_fibration(double a, double vol) {
  if (!(a > 0.0) || !(vol >= 0.0)) return 0.0;
  return crmod::analytic_modulus_fibration(a, vol);
}

crmod_status crmod_map_builtin(const char* name, double param, double param2, crmod_map** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    *out = nullptr;
    const std::string n = name;
    crmod::ContactMap f;
    if (n == "identity") f = crmod::identity_map();
    else if (n == "f0") f = crmod::extremal_map(param);
    else if (n == "t-translation") f = crmod::t_translation(param);
    else if (n == "competitor") {
      f = crmod::t_translation(param2, crmod::MetricK(param));
      f.name = "f0 o t-translation";
    } else if (n == "flow-x") f = crmod::flow_x_map(param);
    else if (n == "dilation") f = crmod::dilation_map(param);
    else if (n == "stretch-t") f = crmod::stretch_t_map();
    else crmod::fail(crmod::ErrorCode::InvalidArgument, "unknown built-in map '" + n + "'");
    *out = new crmod_map{std::move(f)};
  });
}

crmod_status crmod_map_affine(const double coeffs[12], crmod_map** out) {
  return guarded([&] {
    need(coeffs, "coeffs");
    need(out, "out");
    *out = nullptr;
    *out = new crmod_map{crmod::affine_map(std::span<const double, 12>(coeffs, 12))};
  });
}

crmod_status crmod_map_apply(const crmod_map* f, crmod_point p, crmod_point* out) {
  return guarded([&] {
    need(f, "map");
    need(out, "out");
    *out = to_c(f->impl.forward(to_cpp(p)));
  });
}

void crmod_map_destroy(crmod_map* f) { delete f; }

crmod_status crmod_map_dilatation(const crmod_map* f, crmod_point q, int analytic,
                                  crmod_dilatation_report* out) {
  return guarded([&] {
    need(f, "map");
    need(out, "out");
    const crmod::DifferentialProbe probe = crmod::probe_differential(f->impl, to_cpp(q), analytic != 0);
    *out = {};
    out->contact_residual = probe.contact_residual;
    if (!(probe.contact_residual <= crmod::kDefaultContactTol))
      crmod::fail(crmod::ErrorCode::NotContact,
                  "map '" + f->impl.name + "' is not contact at q: eta residual " +
                      std::to_string(probe.contact_residual));
    const crmod::DilatationReport d = crmod::dilatation(probe.matrix, f->impl.target);
    out->lambda1 = d.lambda1;
    out->lambda2 = d.lambda2;
    out->K = d.K_at_q;
    out->jacobian = d.jacobian;
    out->has_mu = d.mu ? 1 : 0;
    if (d.mu) {
      out->mu_re = d.mu->real();
      out->mu_im = d.mu->imag();
    }
  });
}

crmod_status crmod_experiment_run(const char* command, const char* config_json,
                                  char** record_json) {
  return guarded([&] {
    need(command, "command");
    need(record_json, "record_json");
    *record_json = nullptr;
    const crmod::ExperimentConfig c = parse_config(config_json);
    *record_json = dup_string(crmod::run_experiment(command, c).dump());
  });
}

crmod_status crmod_experiment_config(const char* config_json, char** normalized_json) {
  return guarded([&] {
    need(normalized_json, "normalized_json");
    *normalized_json = nullptr;
    const crmod::ExperimentConfig c = parse_config(config_json);
    crmod::ordered_json j = crmod::config_to_json(c);
    j["config_hash"] = crmod::config_hash(c);
    *normalized_json = dup_string(j.dump());
  });
}

void crmod_string_free(char* s) { std::free(s); }

}  // extern "C"
