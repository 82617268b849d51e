// psf: realize, verify, sweep and contraction experiments from the command line.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psf/psf.h"

namespace {

enum Exit { kOk = 0, kMalformed = 1, kMaxIter = 2, kDegenerate = 3, kVerifyFail = 4, kInconclusive = 5 };

const char* kFormats = R"(Exit codes:
  0  success (CONVERGED, verification passed, ratio + error < 1)
  1  malformed or rejected input
  2  MAX_ITER, or no oracle solution
  3  DEGENERATE or GEOMETRY_ABORT
  4  verification failed
  5  contraction inconclusive (1 inside the error bar, or quadrature failure)

File formats:
  complex      [re, im]; the point at infinity is "inf"
  params       {"kind": "exp"|"pexp"|"av2", "p": int (pexp),
                "lambda": complex (exp, pexp) | "alpha": complex, "beta": complex (av2)}
  portrait     {"family": {"kind": ..., "p": ...}, "k1": int, "l": int, "branch": [int],
                "succ": [int] (optional), "eta": int,
                "critical_case": "periodic_c"|"nonperiodic_c_and_fc" (pexp),
                "second_orbit": {"k1", "l", "branch", "succ"?} (av2),
                "lambda_seed": complex (pexp)}
  differential {"poles": [complex], "coeffs": [complex]}
  result       {"status", "params", "steps", "final_gap", "message"?, "curve", "compactness"?}
  verification {"residual", "min_orbit_gap", "pass", "diverged", "orbit": [complex], "second_orbit"?}
  contraction  {"truncation", "source_norm", "source_error", "image_norm", "image_error",
                "image_norm_2m", "ratio", "ratio_2m", "truncation_discrepancy", "ratio_error",
                "margin", "conclusive"}
  trace CSV    step, lambda_re, lambda_im (alpha_re, alpha_im, beta_re, beta_im for av2),
               z<i>_re, z<i>_im per marked point, min_gap, param_modulus, eta_n,
               displacement, semiconjugacy_residual
  sweep CSV    row, branch, eta, status, param, steps, min_gap, oracle_distance (--cross-check)
)";

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

int report_error(psf_status s) {
  std::cerr << "error: " << psf_status_string(s);
  if (*psf_last_error()) std::cerr << ": " << psf_last_error();
  std::cerr << '\n';
  switch (s) {
    case PSF_NO_CONVERGENCE: return kMaxIter;
    case PSF_DEGENERATE: return kDegenerate;
    case PSF_QUADRATURE: return kInconclusive;
    default: return kMalformed;
  }
}

// Owns a parsed portrait; prints violations when it does not validate.
struct Portrait {
  psf_portrait* p = nullptr;
  ~Portrait() { psf_portrait_free(p); }
};

int load_portrait(const std::string& path, Portrait& out) {
  const auto text = slurp(path);
  if (!text) {
    std::cerr << "error: cannot read " << path << '\n';
    return kMalformed;
  }
  const psf_status s = psf_portrait_parse(text->c_str(), &out.p);
  if (s == PSF_INVALID_PORTRAIT && out.p) {
    std::cerr << "invalid portrait:\n";
    for (size_t i = 0; i < psf_portrait_violation_count(out.p); ++i) {
      std::cerr << "  - " << psf_portrait_violation(out.p, i) << '\n';
    }
    return kMalformed;
  }
  if (s != PSF_OK) return report_error(s);
  return kOk;
}

struct Result {
  psf_result* r = nullptr;
  ~Result() { psf_result_free(r); }
};

bool parse_branch_range(const std::string& text, psf_branch_range& out) {
  int k, lo, hi;
  char tail;
  if (std::sscanf(text.c_str(), "%d:%d:%d%c", &k, &lo, &hi, &tail) != 3) return false;
  out = {k, lo, hi};
  return true;
}

bool parse_eta_range(const std::string& text, int out[2]) {
  char tail;
  return std::sscanf(text.c_str(), "%d:%d%c", &out[0], &out[1], &tail) == 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thurston pullback realization of post-singularly finite exponential-type maps"};
  app.footer(kFormats);
  app.require_subcommand(1);

  psf_settings settings;
  psf_settings_default(&settings);
  std::string out_path, trace_path, plot_path;
  std::string portrait_path, params_path, diff_path;
  double verify_tol = 1e-9;
  int truncation = 64, jobs = 1, starts = 256;
  std::vector<std::string> branch_ranges;
  std::string eta_range;
  bool cross_check = false;

  auto add_iteration_flags = [&](CLI::App* c) {
    c->add_option("--tol", settings.tol, "convergence tolerance on marked-point displacement")
        ->capture_default_str();
    c->add_option("--max-iter", settings.max_iter, "maximum pullback steps")->capture_default_str();
    c->add_option("--min-gap-abort", settings.min_gap_abort, "bounded-geometry abort threshold")
        ->capture_default_str();
  };

  CLI::App* realize = app.add_subcommand("realize", "run the pullback iteration on a portrait");
  realize->add_option("portrait", portrait_path, "portrait JSON")->required();
  add_iteration_flags(realize);
  realize->add_option("--out", out_path, "result JSON (stdout when omitted)");
  realize->add_option("--trace", trace_path, "trace CSV");
  realize->add_option("--plot", plot_path, "SVG of trajectories and parameter modulus");

  CLI::App* verify = app.add_subcommand("verify", "check that parameters realize a portrait");
  verify->add_option("params", params_path, "params JSON")->required();
  verify->add_option("portrait", portrait_path, "portrait JSON")->required();
  verify->add_option("--tol", verify_tol, "orbit residual tolerance")->capture_default_str();
  verify->add_option("--out", out_path, "verification JSON (stdout when omitted)");

  CLI::App* sweep = app.add_subcommand("sweep", "realize a family of portraits built from a template");
  sweep->add_option("portrait", portrait_path, "template portrait JSON")->required();
  add_iteration_flags(sweep);
  sweep->add_option("--branch-range", branch_ranges, "K:LO:HI, branch[K] over LO..HI (repeatable)");
  sweep->add_option("--eta-range", eta_range, "LO:HI");
  sweep->add_option("--jobs", jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_flag("--cross-check", cross_check, "compare each row with the direct oracle solve");
  sweep->add_option("--out", out_path, "sweep JSON");

  CLI::App* contract = app.add_subcommand("contract", "push-forward contraction ratio of a differential");
  contract->add_option("params", params_path, "params JSON")->required();
  contract->add_option("differential", diff_path, "differential JSON")->required();
  contract->add_option("--truncation", truncation, "preimage truncation M")->capture_default_str();
  contract->add_option("--out", out_path, "contraction JSON (stdout when omitted)");

  CLI::App* oracle = app.add_subcommand("oracle", "solve the orbit equations directly");
  oracle->add_option("portrait", portrait_path, "portrait JSON")->required();
  oracle->add_option("--starts", starts, "Halton starts")->capture_default_str();
  oracle->add_option("--out", out_path, "oracle JSON (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kMalformed;
  }

  if (*realize) {
    Portrait port;
    if (int rc = load_portrait(portrait_path, port)) return rc;
    Result res;
    if (psf_status s = psf_realize(port.p, &settings, &res.r)) return report_error(s);
    bool ok = write_text(out_path, psf_result_json(res.r));
    if (!trace_path.empty()) ok = write_text(trace_path, psf_result_csv(res.r)) && ok;
    if (!plot_path.empty()) ok = write_text(plot_path, psf_result_svg(res.r)) && ok;
    if (!ok) {
      std::cerr << "error: cannot write output\n";
      return kMalformed;
    }
    switch (psf_result_outcome(res.r)) {
      case PSF_CONVERGED: return kOk;
      case PSF_MAX_ITER: return kMaxIter;
      default: return kDegenerate;
    }
  }

  if (*verify) {
    Portrait port;
    if (int rc = load_portrait(portrait_path, port)) return rc;
    const auto params = slurp(params_path);
    if (!params) {
      std::cerr << "error: cannot read " << params_path << '\n';
      return kMalformed;
    }
    Result res;
    if (psf_status s = psf_verify(params->c_str(), port.p, verify_tol, &res.r)) return report_error(s);
    if (!write_text(out_path, psf_result_json(res.r))) return kMalformed;
    return psf_result_outcome(res.r) == PSF_PASS ? kOk : kVerifyFail;
  }

  if (*sweep) {
    std::vector<psf_branch_range> ranges;
    for (const std::string& t : branch_ranges) {
      psf_branch_range r;
      if (!parse_branch_range(t, r)) {
        std::cerr << "error: --branch-range expects K:LO:HI, got " << t << '\n';
        return kMalformed;
      }
      ranges.push_back(r);
    }
    int eta[2];
    if (!eta_range.empty() && !parse_eta_range(eta_range, eta)) {
      std::cerr << "error: --eta-range expects LO:HI, got " << eta_range << '\n';
      return kMalformed;
    }
    // A template may be incomplete for the swept fields, so violations are
    // reported per row instead of rejecting it here.
    const auto text = slurp(portrait_path);
    if (!text) {
      std::cerr << "error: cannot read " << portrait_path << '\n';
      return kMalformed;
    }
    Portrait port;
    const psf_status ps = psf_portrait_parse(text->c_str(), &port.p);
    if (ps != PSF_OK && ps != PSF_INVALID_PORTRAIT) return report_error(ps);
    Result res;
    if (psf_status s = psf_sweep(port.p, &settings, ranges.data(), ranges.size(),
                                 eta_range.empty() ? nullptr : eta, jobs, cross_check, &res.r)) {
      return report_error(s);
    }
    std::cout << psf_result_csv(res.r);
    if (!out_path.empty() && !write_text(out_path, psf_result_json(res.r))) return kMalformed;
    return kOk;
  }

  if (*contract) {
    const auto params = slurp(params_path);
    const auto diff = slurp(diff_path);
    if (!params || !diff) {
      std::cerr << "error: cannot read " << (!params ? params_path : diff_path) << '\n';
      return kMalformed;
    }
    Result res;
    if (psf_status s = psf_contract(params->c_str(), diff->c_str(), truncation, &res.r)) {
      return report_error(s);
    }
    if (!write_text(out_path, psf_result_json(res.r))) return kMalformed;
    return psf_result_outcome(res.r) == PSF_CONCLUSIVE ? kOk : kInconclusive;
  }

  if (*oracle) {
    Portrait port;
    if (int rc = load_portrait(portrait_path, port)) return rc;
    Result res;
    if (psf_status s = psf_oracle(port.p, starts, &res.r)) return report_error(s);
    if (!write_text(out_path, psf_result_json(res.r))) return kMalformed;
    return kOk;
  }
  return kMalformed;
}
