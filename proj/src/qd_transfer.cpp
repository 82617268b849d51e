#include "psf/qd_transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "psf/error.hpp"

namespace psf {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double max_pole_modulus(const QuadraticDifferential& q) {
  double r = 0.0;
  for (const cplx& p : q.poles) r = std::max(r, std::abs(p));
  return r;
}

}  // namespace

bool QuadraticDifferential::is_zero() const noexcept {
  return std::all_of(coeffs.begin(), coeffs.end(), [](cplx a) { return a == cplx(0.0, 0.0); });
}

cplx QuadraticDifferential::operator()(cplx w) const {
  const double R = max_pole_modulus(*this);
  cplx sum(0.0, 0.0);
  if (std::abs(w) > 2.0 * R) {
    // sum a_j/(w-p_j) = w^-2 sum a_j p_j^2/(w-p_j) once sum a_j = sum a_j p_j = 0;
    // this form keeps full relative accuracy far from the poles.
    for (std::size_t j = 0; j < poles.size(); ++j) {
      sum += coeffs[j] * poles[j] * poles[j] / (w - poles[j]);
    }
    return sum / (w * w);
  }
  for (std::size_t j = 0; j < poles.size(); ++j) sum += coeffs[j] / (w - poles[j]);
  return sum;
}

void QuadraticDifferential::validate() const {
  if (poles.size() != coeffs.size()) {
    fail(ErrorCode::InvalidArgument, "differential needs one coefficient per pole");
  }
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (!finite(poles[i]) || !finite(coeffs[i])) {
      fail(ErrorCode::InvalidArgument, "differential poles and coefficients must be finite");
    }
    for (std::size_t j = i + 1; j < poles.size(); ++j) {
      if (poles[i] == poles[j]) fail(ErrorCode::InvalidArgument, "repeated pole");
    }
  }
  cplx s0(0.0, 0.0), s1(0.0, 0.0);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t j = 0; j < poles.size(); ++j) {
    s0 += coeffs[j];
    s1 += coeffs[j] * poles[j];
    m0 += std::abs(coeffs[j]);
    m1 += std::abs(coeffs[j] * poles[j]);
  }
  if (std::abs(s0) > 1e-9 * std::max(m0, 1e-300) || std::abs(s1) > 1e-9 * std::max(m1, 1e-300)) {
    if (m0 > 0.0) {
      fail(ErrorCode::InvalidArgument,
           "differential is not integrable at infinity: need sum a_j = 0 and sum a_j p_j = 0");
    }
  }
}

QuadraticDifferential QuadraticDifferential::scaled(cplx c) const {
  QuadraticDifferential out = *this;
  for (cplx& a : out.coeffs) a *= c;
  return out;
}

QuadraticDifferential QuadraticDifferential::plus(const QuadraticDifferential& other) const {
  QuadraticDifferential out = *this;
  for (std::size_t j = 0; j < other.poles.size(); ++j) {
    auto it = std::find(out.poles.begin(), out.poles.end(), other.poles[j]);
    if (it == out.poles.end()) {
      out.poles.push_back(other.poles[j]);
      out.coeffs.push_back(other.coeffs[j]);
    } else {
      out.coeffs[static_cast<std::size_t>(it - out.poles.begin())] += other.coeffs[j];
    }
  }
  return out;
}

double QuadraticDifferential::decay_ratio() const {
  const cplx dir = std::polar(1.0, 0.7);
  const double r = std::max(1.0, max_pole_modulus(*this));
  const cplx w2 = 1e2 * r * dir;
  const cplx w3 = 1e3 * r * dir;
  const double a = std::abs((*this)(w2)) * std::pow(std::abs(w2), 3);
  const double b = std::abs((*this)(w3)) * std::pow(std::abs(w3), 3);
  if (a == 0.0) return b == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return b / a;
}

std::vector<QuadraticDifferential> canonical_basis(const std::vector<cplx>& pts) {
  if (pts.size() < 2) fail(ErrorCode::InvalidArgument, "canonical basis needs 0 and 1");
  const cplx p0 = pts[0];
  const cplx p1 = pts[1];
  if (p0 == p1) fail(ErrorCode::InvalidArgument, "first two marked points coincide");
  std::vector<QuadraticDifferential> basis;
  for (std::size_t j = 2; j < pts.size(); ++j) {
    const cplx a1 = (p0 - pts[j]) / (p1 - p0);
    basis.push_back({{p0, p1, pts[j]}, {-1.0 - a1, a1, cplx(1.0, 0.0)}});
  }
  return basis;
}

std::vector<cplx> contraction_points(const std::vector<cplx>& pts) {
  std::vector<cplx> out = pts;
  if (out.size() == 2) out.emplace_back(2.0, 0.0);
  return out;
}

cplx wright_omega(cplx y) {
  if (!finite(y)) fail(ErrorCode::Domain, "wright_omega of a non-finite value");
  auto solve = [&](cplx w) -> std::optional<cplx> {
    for (int it = 0; it < 60; ++it) {
      if (w == cplx(0.0, 0.0) || !finite(w)) return std::nullopt;
      const cplx f = w + std::log(w) - y;
      const cplx step = f * w / (w + 1.0);
      w -= step;
      if (std::abs(step) <= 4e-16 * std::max(1.0, std::abs(w))) break;
    }
    if (w == cplx(0.0, 0.0) || !finite(w)) return std::nullopt;
    if (std::abs(w + std::log(w) - y) > 1e-12 * std::max(1.0, std::abs(y))) return std::nullopt;
    return w;
  };
  std::vector<cplx> guesses;
  constexpr double pi = std::numbers::pi;
  if (y.real() < -2.0 && std::abs(y.imag()) < pi) guesses.push_back(std::exp(y));
  if (std::abs(y) > 1.0) guesses.push_back(y - std::log(y));
  guesses.push_back(1.0 + 0.5 * (y - 1.0));
  // Near the branch points -1 +- i pi, omega ~ -1 +- i sqrt(2 (y + 1 -+ i pi)).
  for (double sgn : {1.0, -1.0}) {
    const cplx d = y - cplx(-1.0, sgn * pi);
    guesses.push_back(-1.0 + sgn * cplx(0.0, 1.0) * std::sqrt(2.0 * d));
    guesses.push_back(-1.0 - sgn * cplx(0.0, 1.0) * std::sqrt(2.0 * d));
  }
  guesses.push_back(std::exp(y));
  for (const cplx& g : guesses) {
    if (auto w = solve(g)) return *w;
  }
  fail(ErrorCode::NoConvergence, "wright_omega did not converge");
}

namespace {

// Principal log without the hypot call std::log makes.
cplx fast_log(cplx z) { return {0.5 * std::log(std::norm(z)), std::atan2(z.imag(), z.real())}; }

struct Window {
  long lo;
  long count;
};

Window window(const FamilySpec& spec, int truncation) {
  if (spec.kind == FamilyKind::PExp) {
    const long p = spec.p;
    return {-p * truncation - (p + 1) / 2, p * (2L * truncation + 1)};
  }
  return {-static_cast<long>(truncation), 2L * truncation + 1};
}

cplx preimage_w(const FamilySpec& spec, const FamilyParams& params, cplx zeta, long n,
                cplx& dw, cplx& hint, bool use_hint) {
  constexpr double pi = std::numbers::pi;
  switch (spec.kind) {
    case FamilyKind::Exp:
      dw = 1.0 / params.lambda;
      return (zeta + cplx(0.0, kTwoPi * static_cast<double>(n))) / params.lambda;
    case FamilyKind::AV2:
      dw = 1.0 / params.beta;
      return (zeta + cplx(0.0, kTwoPi * static_cast<double>(n))) / params.beta;
    case FamilyKind::PExp: {
      const double p = spec.p;
      const cplx y = zeta / p - 1.0 + cplx(0.0, pi * (1.0 + 2.0 * static_cast<double>(n) / p));
      cplx u;
      bool done = false;
      if (use_hint && hint != cplx(0.0, 0.0)) {
        // Consecutive branches differ by 2 pi i / p in y; Newton from the
        // previous root, verified the same way as wright_omega.
        // Second-order predictor from the previous root (omega' = omega/(1+omega),
        // omega'' = omega/(1+omega)^3), then Fritsch-Shafer-Crowley steps.
        const cplx d(0.0, 2.0 * pi / p);
        const cplx h1 = hint + 1.0;
        cplx v = hint + d * hint / h1 + 0.5 * d * d * hint / (h1 * h1 * h1);
        for (int it = 0; it < 4 && finite(v) && std::abs(v + 1.0) > 0.25; ++it) {
          const cplx r = y - v - fast_log(v);
          const cplx q = 2.0 * (1.0 + v) * (1.0 + v + (2.0 / 3.0) * r);
          const cplx step = v * (r / (1.0 + v)) * ((q - r) / (q - 2.0 * r));
          v += step;
          // Quartic convergence: a step this small leaves an error below rounding.
          if (std::abs(step) <= 1e-4 * std::abs(v)) {
            u = v;
            done = finite(v);
            break;
          }
        }
      }
      if (!done) {
        try {
          u = wright_omega(y);
        } catch (const Error&) {
          fail(ErrorCode::NoConvergence, "preimage on sheet " + std::to_string(n) + " failed");
        }
      }
      hint = u;
      const cplx w = (p / params.lambda) * u;
      dw = 1.0 / (p / w + params.lambda);
      return w;
    }
  }
  return {};
}

// Phi(zeta) for truncations M and 2M in one pass over the 2M window.
std::pair<cplx, cplx> strip_density(const QuadraticDifferential& q, const FamilySpec& spec,
                                    const FamilyParams& params, cplx zeta, int truncation) {
  const Window big = window(spec, 2 * truncation);
  const Window small = window(spec, truncation);
  cplx sm(0.0, 0.0), bg(0.0, 0.0);
  cplx hint(0.0, 0.0);
  for (long i = 0; i < big.count; ++i) {
    const long n = big.lo + i;
    cplx dw;
    const cplx w = preimage_w(spec, params, zeta, n, dw, hint, i > 0);
    const cplx term = q(w) * dw * dw;
    bg += term;
    if (n >= small.lo && n < small.lo + small.count) sm += term;
  }
  return {sm, bg};
}

// zeta with z = e^zeta (Exp, PExp) or mobius(alpha, e^zeta) = z (AV2), and
// dzeta/dz.
std::pair<cplx, cplx> strip_coordinate(const FamilySpec& spec, const FamilyParams& params, cplx z) {
  if (!finite(z) || z == cplx(0.0, 0.0)) fail(ErrorCode::Domain, "push-forward at an asymptotic value");
  if (spec.kind == FamilyKind::AV2) {
    const ExtendedComplex u = mobius_invert(params.alpha, z);
    if (u.is_infinite() || u.value() == cplx(0.0, 0.0)) {
      fail(ErrorCode::Domain, "push-forward at an asymptotic value");
    }
    const cplx uu = u.value();
    return {branch_log(uu, 0), 1.0 / (uu * mobius_derivative(params.alpha, uu))};
  }
  if (spec.kind == FamilyKind::PExp && z == cplx(1.0, 0.0)) {
    fail(ErrorCode::Domain, "push-forward at the critical value");
  }
  return {branch_log(z, 0), 1.0 / z};
}

}  // namespace

std::vector<Preimage> preimages(const FamilySpec& spec, const FamilyParams& params, cplx zeta,
                                int truncation) {
  validate_params(spec, params);
  if (truncation < 1) fail(ErrorCode::InvalidArgument, "truncation must be at least 1");
  const Window win = window(spec, truncation);
  std::vector<Preimage> out;
  cplx hint(0.0, 0.0);
  for (long i = 0; i < win.count; ++i) {
    cplx dw;
    const cplx w = preimage_w(spec, params, zeta, win.lo + i, dw, hint, i > 0);
    out.push_back({w, dw});
  }
  return out;
}

PushForwardValue push_forward_with_tail(const QuadraticDifferential& q, const FamilySpec& spec,
                                        const FamilyParams& params, cplx z, int truncation) {
  validate_params(spec, params);
  if (truncation < 1) fail(ErrorCode::InvalidArgument, "truncation must be at least 1");
  if (q.is_zero()) return {cplx(0.0, 0.0), cplx(0.0, 0.0)};
  const auto [zeta, dzeta] = strip_coordinate(spec, params, z);
  const auto [sm, bg] = strip_density(q, spec, params, zeta, truncation);
  const cplx f = dzeta * dzeta;
  return {sm * f, (sm - bg) * f};
}

cplx push_forward_at(const QuadraticDifferential& q, const FamilySpec& spec,
                     const FamilyParams& params, cplx z, int truncation) {
  return push_forward_with_tail(q, spec, params, z, truncation).value;
}

namespace {

constexpr double kThetaStep = std::numbers::pi / 4.0;
constexpr double kSStep = 2.0;

void add_singularity(std::vector<quad::Singularity>& out, double s, double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  out.push_back({s, t});
  if (t < 1e-12) out.push_back({s, kTwoPi});
}

// Estimate of the integral beyond s_edge for an integrand decaying like
// exp(-|s - s_edge| / length): the theta-average at the edge times length.
double edge_tail(const quad::Integrand& f, std::size_t n_out, std::size_t comp, double s,
                 double length) {
  constexpr int kN = 128;
  std::vector<double> buf(n_out);
  double sum = 0.0;
  for (int i = 0; i < kN; ++i) {
    f(s, kTwoPi * (i + 0.5) / kN, buf.data());
    sum += buf[comp];
  }
  return sum * kTwoPi / kN * length;
}

}  // namespace

NormEstimate qd_norm(const QuadraticDifferential& q, const QuadSettings& settings) {
  q.validate();
  if (q.is_zero()) return {};
  double rmin = 1.0, rmax = 1.0;
  std::vector<quad::Singularity> sing;
  for (const cplx& p : q.poles) {
    if (p == cplx(0.0, 0.0)) continue;
    rmin = std::min(rmin, std::abs(p));
    rmax = std::max(rmax, std::abs(p));
    add_singularity(sing, std::log(std::abs(p)), arg_0_2pi(p));
  }
  const double lo = std::log(rmin) - settings.tail_length;
  const double hi = std::log(rmax) + settings.tail_length;
  const quad::Integrand f = [&](double s, double t, double* out) {
    const cplx w = std::polar(std::exp(s), t);
    out[0] = std::abs(q(w)) * std::exp(2.0 * s);
  };
  const auto cells = quad::singular_grid(lo, hi, 0.0, kTwoPi, sing, kSStep, kThetaStep);
  quad::Settings qs;
  qs.rel_tol = settings.rel_tol;
  qs.max_evals = settings.max_evals;
  const quad::Result r = quad::integrate(f, 1, cells, qs);
  NormEstimate est{r.value[0], r.error[0], r.evals};
  est.error += edge_tail(f, 1, 0, lo, 1.0) + edge_tail(f, 1, 0, hi, 1.0);
  if (!(est.error <= settings.fail_rel_tol * est.value)) {
    fail(ErrorCode::Quadrature, "norm quadrature missed the required relative error");
  }
  return est;
}

ContractionReport contraction_ratio(const QuadraticDifferential& q, const FamilySpec& spec,
                                    const FamilyParams& params, int truncation,
                                    const QuadSettings& settings) {
  validate_params(spec, params);
  q.validate();
  if (q.is_zero()) fail(ErrorCode::InvalidArgument, "contraction of the zero differential");
  if (truncation < 1) fail(ErrorCode::InvalidArgument, "truncation must be at least 1");
  if (q.decay_ratio() > 2.0) {
    fail(ErrorCode::InvalidArgument, "differential does not decay cubically at infinity");
  }

  ContractionReport rep;
  rep.truncation = truncation;
  rep.source = qd_norm(q, settings);

  // Images of the poles in the strip coordinate zeta; 0 maps to an
  // asymptotic value at the end of the strip.
  std::vector<quad::Singularity> sing;
  double smin = 0.0, smax = 0.0;
  auto mark = [&](cplx zeta) {
    smin = std::min(smin, zeta.real());
    smax = std::max(smax, zeta.real());
    add_singularity(sing, zeta.real(), zeta.imag());
  };
  double length = 1.0;
  switch (spec.kind) {
    case FamilyKind::Exp:
      for (const cplx& p : q.poles) mark(params.lambda * p);
      break;
    case FamilyKind::AV2:
      for (const cplx& p : q.poles) mark(params.beta * p);
      break;
    case FamilyKind::PExp: {
      length = spec.p;
      mark(cplx(0.0, 0.0));  // critical value
      const cplx la = pexp_log_alpha(spec.p, params.lambda);
      for (const cplx& p : q.poles) {
        if (p == cplx(0.0, 0.0)) continue;
        mark(static_cast<double>(spec.p) * branch_log(p, 0) + params.lambda * p + la);
      }
      break;
    }
  }
  const double lo = smin - settings.tail_length * length;
  const double hi = smax + settings.tail_length * length;

  const quad::Integrand f = [&](double s, double t, double* out) {
    const auto [sm, bg] = strip_density(q, spec, params, cplx(s, t), truncation);
    out[0] = std::abs(sm);
    out[1] = std::abs(bg);
  };
  const auto cells = quad::singular_grid(lo, hi, 0.0, kTwoPi, sing, kSStep * length, kThetaStep);
  quad::Settings qs;
  qs.rel_tol = settings.rel_tol;
  qs.abs_tol = settings.rel_tol * rep.source.value;
  qs.max_evals = settings.max_evals;
  const quad::Result r = quad::integrate(f, 2, cells, qs);
  rep.image = {r.value[0], r.error[0], r.evals};
  rep.image_2m = {r.value[1], r.error[1], r.evals};
  rep.image.error += edge_tail(f, 2, 0, lo, length) + edge_tail(f, 2, 0, hi, length);
  rep.image_2m.error += edge_tail(f, 2, 1, lo, length) + edge_tail(f, 2, 1, hi, length);

  const double fail_abs = settings.fail_rel_tol * rep.source.value;
  if (!(rep.image.error <= std::max(fail_abs, settings.fail_rel_tol * rep.image.value))) {
    fail(ErrorCode::Quadrature, "push-forward quadrature missed the required error");
  }

  const double src = rep.source.value;
  rep.ratio = rep.image.value / src;
  rep.ratio_2m = rep.image_2m.value / src;
  rep.truncation_discrepancy = std::abs(rep.ratio - rep.ratio_2m);
  rep.ratio_error =
      (rep.image.error + rep.ratio * rep.source.error) / src + rep.truncation_discrepancy;
  rep.conclusive = rep.ratio + rep.ratio_error < 1.0;
  return rep;
}

}  // namespace psf
