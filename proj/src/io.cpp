#include "psf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "psf/error.hpp"

namespace psf::io {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::Parse, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) bad("expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field \"") + key + "\"");
  return *it;
}

int int_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) bad(std::string("\"") + key + "\" must be an integer");
  return v.get<int>();
}

std::vector<int> int_array(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) bad(std::string("\"") + key + "\" must be an array");
  std::vector<int> out;
  for (const json& e : v) {
    if (!e.is_number_integer()) bad(std::string("\"") + key + "\" must hold integers");
    out.push_back(e.get<int>());
  }
  return out;
}

// Doubles that JSON cannot hold are written as strings.
json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

OrbitBlock block_from_json(const json& j) {
  OrbitBlock b;
  b.k1 = int_field(j, "k1");
  b.l = int_field(j, "l");
  b.branch = int_array(j, "branch");
  if (j.contains("succ")) {
    b.succ = int_array(j, "succ");
  } else if (b.k1 >= 0 && b.l >= 1) {
    b.succ = canonical_successor(b.k1, b.l);
  }
  return b;
}

json block_to_json(const OrbitBlock& b) {
  json j;
  j["k1"] = b.k1;
  j["l"] = b.l;
  j["branch"] = b.branch;
  j["succ"] = b.succ;
  return j;
}

}  // namespace

json to_json(cplx z) { return json::array({number(z.real()), number(z.imag())}); }

json to_json(const ExtendedComplex& z) {
  if (z.is_infinite()) return "inf";
  return to_json(z.value());
}

cplx complex_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    bad(what + " must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

ExtendedComplex extended_from_json(const json& j, const std::string& what) {
  if (j.is_string() && j.get<std::string>() == "inf") return ExtendedComplex::infinity();
  return complex_from_json(j, what);
}

json to_json(const FamilySpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  if (spec.kind == FamilyKind::PExp) j["p"] = spec.p;
  return j;
}

FamilySpec family_from_json(const json& j) {
  const json& k = field(j, "kind");
  if (!k.is_string()) bad("\"kind\" must be a string");
  const std::string kind = k.get<std::string>();
  FamilySpec spec;
  if (kind == "exp") {
    spec = FamilySpec::exponential();
  } else if (kind == "pexp") {
    spec = FamilySpec::polynomial_exponential(int_field(j, "p"));
  } else if (kind == "av2") {
    spec = FamilySpec::two_asymptotic_values();
  } else {
    bad("unknown family kind \"" + kind + "\"");
  }
  spec.validate();
  return spec;
}

json to_json(const FamilySpec& spec, const FamilyParams& params) {
  json j = to_json(spec);
  if (spec.kind == FamilyKind::AV2) {
    j["alpha"] = to_json(params.alpha);
    j["beta"] = to_json(params.beta);
  } else {
    j["lambda"] = to_json(params.lambda);
  }
  return j;
}

std::pair<FamilySpec, FamilyParams> params_from_json(const json& j) {
  const FamilySpec spec = family_from_json(j);
  FamilyParams params;
  if (spec.kind == FamilyKind::AV2) {
    params = FamilyParams::av2(complex_from_json(field(j, "alpha"), "alpha"),
                               complex_from_json(field(j, "beta"), "beta"));
  } else {
    params = FamilyParams::exponential(complex_from_json(field(j, "lambda"), "lambda"));
  }
  validate_params(spec, params);
  return {spec, params};
}

json to_json(const OrbitPortrait& port) {
  json j;
  j["family"] = to_json(port.family);
  j["k1"] = port.orbit.k1;
  j["l"] = port.orbit.l;
  j["branch"] = port.orbit.branch;
  j["succ"] = port.orbit.succ;
  j["eta"] = port.eta;
  if (port.critical_case != CriticalCase::None) j["critical_case"] = to_string(port.critical_case);
  if (port.second_orbit) j["second_orbit"] = block_to_json(*port.second_orbit);
  if (port.lambda_seed) j["lambda_seed"] = to_json(*port.lambda_seed);
  return j;
}

OrbitPortrait portrait_from_json(const json& j) {
  try {
    OrbitPortrait port;
    port.family = family_from_json(field(j, "family"));
    port.orbit = block_from_json(j);
    port.eta = j.contains("eta") ? int_field(j, "eta") : 0;
    if (j.contains("critical_case")) {
      const json& c = j["critical_case"];
      const std::string s = c.is_string() ? c.get<std::string>() : "";
      if (s == "periodic_c") {
        port.critical_case = CriticalCase::PeriodicC;
      } else if (s == "nonperiodic_c_and_fc") {
        port.critical_case = CriticalCase::NonperiodicCAndFc;
      } else {
        bad("\"critical_case\" must be \"periodic_c\" or \"nonperiodic_c_and_fc\"");
      }
    }
    if (j.contains("second_orbit")) port.second_orbit = block_from_json(j["second_orbit"]);
    if (j.contains("lambda_seed")) port.lambda_seed = complex_from_json(j["lambda_seed"], "lambda_seed");
    return port;
  } catch (const json::exception& e) {
    bad(e.what());
  }
}

json to_json(const QuadraticDifferential& q) {
  json j;
  j["poles"] = json::array();
  j["coeffs"] = json::array();
  for (cplx p : q.poles) j["poles"].push_back(to_json(p));
  for (cplx a : q.coeffs) j["coeffs"].push_back(to_json(a));
  return j;
}

QuadraticDifferential differential_from_json(const json& j) {
  QuadraticDifferential q;
  const json& poles = field(j, "poles");
  const json& coeffs = field(j, "coeffs");
  if (!poles.is_array() || !coeffs.is_array()) bad("\"poles\" and \"coeffs\" must be arrays");
  for (const json& p : poles) q.poles.push_back(complex_from_json(p, "pole"));
  for (const json& a : coeffs) q.coeffs.push_back(complex_from_json(a, "coefficient"));
  q.validate();
  return q;
}

json to_json(const IterationResult& result, const FamilySpec& spec) {
  json j;
  j["status"] = to_string(result.status);
  j["params"] = result.params ? to_json(spec, *result.params) : json(nullptr);
  j["steps"] = result.trace.steps.size();
  if (!result.trace.steps.empty()) {
    j["final_gap"] = number(result.trace.steps.back().diag.min_gap);
  } else if (result.trace.initial.size() >= 2) {
    j["final_gap"] = number(min_spherical_gap(result.trace.initial));
  } else {
    j["final_gap"] = nullptr;
  }
  if (!result.message.empty()) j["message"] = result.message;
  return j;
}

json to_json(const VerificationReport& report) {
  json j;
  j["residual"] = number(report.residual);
  j["min_orbit_gap"] = number(report.min_orbit_gap);
  j["pass"] = report.pass;
  j["diverged"] = report.diverged;
  j["orbit"] = json::array();
  for (const auto& z : report.orbit) j["orbit"].push_back(to_json(z));
  if (!report.second_orbit.empty()) {
    j["second_orbit"] = json::array();
    for (const auto& z : report.second_orbit) j["second_orbit"].push_back(to_json(z));
  }
  return j;
}

json to_json(const ContractionReport& r) {
  json j;
  j["truncation"] = r.truncation;
  j["source_norm"] = number(r.source.value);
  j["source_error"] = number(r.source.error);
  j["image_norm"] = number(r.image.value);
  j["image_error"] = number(r.image.error);
  j["image_norm_2m"] = number(r.image_2m.value);
  j["ratio"] = number(r.ratio);
  j["ratio_2m"] = number(r.ratio_2m);
  j["truncation_discrepancy"] = number(r.truncation_discrepancy);
  j["ratio_error"] = number(r.ratio_error);
  j["margin"] = number(1.0 - r.ratio - r.ratio_error);
  j["conclusive"] = r.conclusive;
  return j;
}

json to_json(const CompactnessReport& r) {
  json j;
  j["kappa"] = number(r.kappa);
  j["K"] = number(r.K);
  j["bound"] = number(r.bound);
  j["max_param_modulus"] = number(r.max_param_modulus);
  j["vacuous"] = r.vacuous;
  j["satisfied"] = r.satisfied;
  return j;
}

std::string trace_csv(const IterationTrace& trace, const FamilySpec& spec) {
  std::ostringstream out;
  const std::size_t n = trace.initial.size();
  out << "step";
  if (spec.kind == FamilyKind::AV2) {
    out << ",alpha_re,alpha_im,beta_re,beta_im";
  } else {
    out << ",lambda_re,lambda_im";
  }
  for (std::size_t i = 0; i < n; ++i) out << ",z" << i << "_re,z" << i << "_im";
  out << ",min_gap,param_modulus,eta_n,displacement,semiconjugacy_residual\n";
  for (const TraceStep& s : trace.steps) {
    out << s.step;
    if (spec.kind == FamilyKind::AV2) {
      out << ',' << fmt(s.params.alpha.real()) << ',' << fmt(s.params.alpha.imag()) << ','
          << fmt(s.params.beta.real()) << ',' << fmt(s.params.beta.imag());
    } else {
      out << ',' << fmt(s.params.lambda.real()) << ',' << fmt(s.params.lambda.imag());
    }
    for (const ExtendedComplex& z : s.config.positions) {
      if (z.is_infinite()) {
        out << ",inf,inf";
      } else {
        out << ',' << fmt(z.value().real()) << ',' << fmt(z.value().imag());
      }
    }
    out << ',' << fmt(s.diag.min_gap) << ',' << fmt(s.diag.param_modulus) << ','
        << fmt(s.diag.eta_n) << ',' << fmt(s.diag.displacement) << ','
        << fmt(s.diag.semiconjugacy_residual) << '\n';
  }
  return out.str();
}

std::string trace_svg(const IterationTrace& trace, const FamilySpec& spec) {
  constexpr double W = 400.0, H = 400.0, pad = 30.0;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  auto squash = [](cplx z) { return z / (1.0 + std::abs(z)); };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * W + 3 * pad << "\" height=\""
      << H + 2 * pad << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Left panel: the unit disk image of the plane.
  const double cx = pad + W / 2, cy = pad + H / 2, R = W / 2;
  out << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << R
      << "\" fill=\"none\" stroke=\"#999\"/>\n";
  out << "<text x=\"" << pad << "\" y=\"" << pad - 10 << "\" font-size=\"12\">marked points, z/(1+|z|)</text>\n";
  std::vector<const MarkedConfiguration*> levels{&trace.initial};
  for (const TraceStep& s : trace.steps) levels.push_back(&s.config);
  for (std::size_t i = 0; i < trace.initial.size(); ++i) {
    std::ostringstream pts;
    for (const MarkedConfiguration* c : levels) {
      const ExtendedComplex& z = c->positions[i];
      if (z.is_infinite()) continue;
      const cplx q = squash(z.value());
      pts << fmt(cx + R * q.real()) << ',' << fmt(cy - R * q.imag()) << ' ';
    }
    if (pts.str().empty()) continue;
    out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colors[i % 8] << "\" points=\""
        << pts.str() << "\"/>\n";
  }

  // Right panel: log10 |lambda_n| (|beta_n| for AV2).
  const double x0 = 2 * pad + W, y0 = pad;
  out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << W << "\" height=\"" << H
      << "\" fill=\"none\" stroke=\"#999\"/>\n";
  out << "<text x=\"" << x0 << "\" y=\"" << pad - 10 << "\" font-size=\"12\">log10 |"
      << (spec.kind == FamilyKind::AV2 ? "beta" : "lambda") << "_n| vs n</text>\n";
  if (!trace.steps.empty()) {
    double lo = INFINITY, hi = -INFINITY;
    for (const TraceStep& s : trace.steps) {
      const double v = std::log10(std::max(s.diag.param_modulus, 1e-300));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo < 1e-9) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double n = std::max<double>(1.0, static_cast<double>(trace.steps.size() - 1));
    std::ostringstream pts;
    for (const TraceStep& s : trace.steps) {
      const double v = std::log10(std::max(s.diag.param_modulus, 1e-300));
      pts << fmt(x0 + W * s.step / n) << ',' << fmt(y0 + H * (hi - v) / (hi - lo)) << ' ';
    }
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"" << pts.str()
        << "\"/>\n";
    out << "<text x=\"" << x0 + 4 << "\" y=\"" << y0 + 12 << "\" font-size=\"10\">" << fmt(hi)
        << "</text>\n";
    out << "<text x=\"" << x0 + 4 << "\" y=\"" << y0 + H - 4 << "\" font-size=\"10\">" << fmt(lo)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace psf::io
