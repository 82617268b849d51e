#include "psf/psf.h"

#include <cstdio>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "psf/error.hpp"
#include "psf/io.hpp"
#include "psf/sweep.hpp"

struct psf_portrait {
  psf::OrbitPortrait port;
  std::vector<std::string> violations;
};

struct psf_result {
  psf_outcome outcome = PSF_DONE;
  std::string json;
  std::string csv;
  std::string svg;
};

namespace {

thread_local std::string g_error;

psf_status code_of(psf::ErrorCode c) {
  switch (c) {
    case psf::ErrorCode::InvalidArgument: return PSF_INVALID_ARGUMENT;
    case psf::ErrorCode::Domain: return PSF_DOMAIN;
    case psf::ErrorCode::NoConvergence: return PSF_NO_CONVERGENCE;
    case psf::ErrorCode::Degenerate: return PSF_DEGENERATE;
    case psf::ErrorCode::InvalidPortrait: return PSF_INVALID_PORTRAIT;
    case psf::ErrorCode::Parse: return PSF_PARSE;
    case psf::ErrorCode::Quadrature: return PSF_QUADRATURE;
  }
  return PSF_INTERNAL;
}

// Runs f, translating exceptions into status codes and g_error.
template <class F>
psf_status guarded(F&& f) {
  g_error.clear();
  try {
    return f();
  } catch (const psf::Error& e) {
    g_error = e.what();
    return code_of(e.code());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
  } catch (const std::exception& e) {
    g_error = e.what();
  }
  return PSF_INTERNAL;
}

psf_status null_arg(const char* what) {
  g_error = std::string(what) + " is null";
  return PSF_INVALID_ARGUMENT;
}

psf::IterationSettings settings_of(const psf_settings* s) {
  psf::IterationSettings out;
  if (s) {
    out.tol = s->tol;
    out.max_iter = s->max_iter;
    out.min_gap_abort = s->min_gap_abort;
  }
  out.validate();
  return out;
}

psf_outcome outcome_of(psf::IterationStatus s) {
  switch (s) {
    case psf::IterationStatus::Converged: return PSF_CONVERGED;
    case psf::IterationStatus::MaxIter: return PSF_MAX_ITER;
    case psf::IterationStatus::Degenerate: return PSF_DEGENERATE_RUN;
    case psf::IterationStatus::GeometryAbort: return PSF_GEOMETRY_ABORT;
  }
  return PSF_DONE;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

extern "C" {

const char* psf_status_string(psf_status s) {
  switch (s) {
    case PSF_OK: return "ok";
    case PSF_INVALID_ARGUMENT: return "invalid argument";
    case PSF_PARSE: return "parse error";
    case PSF_INVALID_PORTRAIT: return "invalid portrait";
    case PSF_DOMAIN: return "domain error";
    case PSF_NO_CONVERGENCE: return "no convergence";
    case PSF_IO: return "io error";
    case PSF_INTERNAL: return "internal error";
    case PSF_DEGENERATE: return "degenerate";
    case PSF_QUADRATURE: return "quadrature error";
  }
  return "unknown";
}

const char* psf_last_error(void) { return g_error.c_str(); }

void psf_settings_default(psf_settings* s) {
  if (!s) return;
  const psf::IterationSettings d;
  s->tol = d.tol;
  s->max_iter = d.max_iter;
  s->min_gap_abort = d.min_gap_abort;
}

psf_status psf_portrait_parse(const char* json, psf_portrait** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto* p = new psf_portrait;
    try {
      p->port = psf::io::portrait_from_json(psf::io::parse_json(json));
    } catch (...) {
      delete p;
      throw;
    }
    p->violations = psf::validate_portrait(p->port);
    *out = p;
    if (p->violations.empty()) return PSF_OK;
    g_error = p->violations.front();
    return PSF_INVALID_PORTRAIT;
  });
}

void psf_portrait_free(psf_portrait* p) { delete p; }

size_t psf_portrait_violation_count(const psf_portrait* p) { return p ? p->violations.size() : 0; }

const char* psf_portrait_violation(const psf_portrait* p, size_t i) {
  if (!p || i >= p->violations.size()) return nullptr;
  return p->violations[i].c_str();
}

psf_status psf_realize(const psf_portrait* p, const psf_settings* s, psf_result** out) {
  if (!p) return null_arg("portrait");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    psf::require_valid(p->port);
    const psf::IterationResult res = psf::iterate(p->port, settings_of(s));
    auto r = std::make_unique<psf_result>();
    r->outcome = outcome_of(res.status);
    psf::io::json j = psf::io::to_json(res, p->port.family);
    // the curve joining c_k1 and c_k2 that fixes the winding class
    j["curve"] = "segment; midpoint detour of 0.1 |dc| when within 1e-8 of 0 or a marked point";
    if (!res.trace.steps.empty()) {
      j["compactness"] = psf::io::to_json(psf::compactness_bound_check(res.trace, p->port));
    }
    r->json = psf::io::dump(j);
    r->csv = psf::io::trace_csv(res.trace, p->port.family);
    r->svg = psf::io::trace_svg(res.trace, p->port.family);
    *out = r.release();
    return PSF_OK;
  });
}

psf_status psf_verify(const char* params_json, const psf_portrait* p, double tol, psf_result** out) {
  if (!params_json) return null_arg("params_json");
  if (!p) return null_arg("portrait");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const auto [spec, params] = psf::io::params_from_json(psf::io::parse_json(params_json));
    const psf::VerificationReport rep = psf::orbit_verify(spec, params, p->port, tol);
    auto r = std::make_unique<psf_result>();
    r->outcome = rep.pass ? PSF_PASS : PSF_FAIL;
    r->json = psf::io::dump(psf::io::to_json(rep));
    *out = r.release();
    return PSF_OK;
  });
}

psf_status psf_oracle(const psf_portrait* p, int starts, psf_result** out) {
  if (!p) return null_arg("portrait");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    psf::OracleSettings st;
    if (starts > 0) st.starts = starts;
    const psf::OracleResult o = psf::oracle_solve(p->port, st);
    psf::io::json j;
    j["params"] = psf::io::to_json(p->port.family, o.params);
    j["positions"] = psf::io::json::array();
    for (const auto& z : o.positions) j["positions"].push_back(psf::io::to_json(z));
    j["start_index"] = o.start_index;
    j["converged_starts"] = o.converged_starts;
    j["matching_starts"] = o.matching_starts;
    j["distinct_matches"] = o.distinct_matches;
    j["residual"] = o.residual;
    auto r = std::make_unique<psf_result>();
    r->json = psf::io::dump(j);
    *out = r.release();
    return PSF_OK;
  });
}

psf_status psf_contract(const char* params_json, const char* differential_json, int truncation,
                        psf_result** out) {
  if (!params_json) return null_arg("params_json");
  if (!differential_json) return null_arg("differential_json");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const auto [spec, params] = psf::io::params_from_json(psf::io::parse_json(params_json));
    const psf::QuadraticDifferential q =
        psf::io::differential_from_json(psf::io::parse_json(differential_json));
    const psf::ContractionReport rep = psf::contraction_ratio(q, spec, params, truncation);
    auto r = std::make_unique<psf_result>();
    r->outcome = rep.conclusive ? PSF_CONCLUSIVE : PSF_INCONCLUSIVE;
    r->json = psf::io::dump(psf::io::to_json(rep));
    *out = r.release();
    return PSF_OK;
  });
}

psf_status psf_sweep(const psf_portrait* templ, const psf_settings* s, const psf_branch_range* ranges,
                     size_t n_ranges, const int* eta_range, int jobs, int cross_check,
                     psf_result** out) {
  if (!templ) return null_arg("template");
  if (!ranges && n_ranges > 0) return null_arg("ranges");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    psf::SweepSpec spec;
    for (size_t i = 0; i < n_ranges; ++i) spec.branches.push_back({ranges[i].index, ranges[i].lo, ranges[i].hi});
    if (eta_range) spec.eta = std::pair{eta_range[0], eta_range[1]};
    spec.jobs = jobs;
    spec.cross_check = cross_check != 0;
    const std::vector<psf::SweepRow> rows = psf::run_sweep(templ->port, spec, settings_of(s));

    std::ostringstream csv;
    csv << "row,branch,eta,status,param,steps,min_gap";
    if (spec.cross_check) csv << ",oracle_distance";
    csv << '\n';
    psf::io::json arr = psf::io::json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const psf::SweepRow& row = rows[i];
      const psf::FamilySpec& fam = row.portrait.family;
      psf::io::json j;
      j["branch"] = row.portrait.orbit.branch;
      j["eta"] = row.portrait.eta;
      std::string status, param;
      if (!row.violations.empty()) {
        status = "INVALID";
        j["status"] = status;
        j["violations"] = row.violations;
      } else {
        const psf::io::json res = psf::io::to_json(row.result, fam);
        for (const auto& [k, v] : res.items()) j[k] = v;
        status = psf::to_string(row.result.status);
        if (row.result.params) {
          const psf::FamilyParams& pr = *row.result.params;
          param = fam.kind == psf::FamilyKind::AV2
                      ? fmt(pr.alpha.real()) + " " + fmt(pr.alpha.imag()) + " " + fmt(pr.beta.real()) +
                            " " + fmt(pr.beta.imag())
                      : fmt(pr.lambda.real()) + " " + fmt(pr.lambda.imag());
        }
        if (spec.cross_check) j["oracle_distance"] = row.oracle_ok ? psf::io::json(row.oracle_distance) : nullptr;
      }
      arr.push_back(j);
      const std::size_t steps = row.violations.empty() ? row.result.trace.steps.size() : 0;
      const std::string gap =
          row.violations.empty() && !row.result.trace.steps.empty()
              ? fmt(row.result.trace.steps.back().diag.min_gap)
              : "";
      csv << i << ',' << join(row.portrait.orbit.branch) << ',' << row.portrait.eta << ',' << status << ','
          << param << ',' << steps << ',' << gap;
      if (spec.cross_check) csv << ',' << (row.oracle_ok ? fmt(row.oracle_distance) : "");
      csv << '\n';
    }
    auto r = std::make_unique<psf_result>();
    r->json = psf::io::dump(arr);
    r->csv = csv.str();
    *out = r.release();
    return PSF_OK;
  });
}

psf_outcome psf_result_outcome(const psf_result* r) { return r ? r->outcome : PSF_DONE; }
const char* psf_result_json(const psf_result* r) { return r ? r->json.c_str() : ""; }
const char* psf_result_csv(const psf_result* r) { return r ? r->csv.c_str() : ""; }
const char* psf_result_svg(const psf_result* r) { return r ? r->svg.c_str() : ""; }
void psf_result_free(psf_result* r) { delete r; }

}  // extern "C"
