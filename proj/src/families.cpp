#include "psf/families.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "psf/error.hpp"

namespace psf {

namespace {

// exp() of arguments with real part above this overflows double.
constexpr double kExpOverflow = 709.0;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

struct ScalarProblem {
  std::function<cplx(cplx)> f;
  std::function<cplx(cplx)> df;
};

// Damped Newton: steps capped in modulus, halved until |f| decreases.
std::optional<cplx> damped_newton(const ScalarProblem& prob, cplx x, const NewtonSettings& s,
                                  double tol) {
  cplx fx;
  try {
    fx = prob.f(x);
  } catch (const Error&) {
    return std::nullopt;
  }
  for (int it = 0; it < s.max_iter; ++it) {
    if (!finite(fx)) return std::nullopt;
    if (std::abs(fx) < tol) return x;
    const cplx d = prob.df(x);
    if (d == cplx(0.0, 0.0) || !finite(d)) return std::nullopt;
    cplx step = -fx / d;
    if (std::abs(step) > s.step_cap) step *= s.step_cap / std::abs(step);

    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      const cplx xn = x + step;
      cplx fn;
      try {
        fn = prob.f(xn);
      } catch (const Error&) {
        step *= 0.5;
        continue;
      }
      if (finite(fn) && std::abs(fn) < std::abs(fx)) {
        x = xn;
        fx = fn;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return std::abs(fx) < tol ? std::optional<cplx>(x) : std::nullopt;
  }
  if (std::abs(fx) < tol) return x;
  return std::nullopt;
}

// Runs Newton from the seed, then from seeds spread on a circle around it.
std::optional<cplx> newton_with_retries(const ScalarProblem& prob, cplx seed,
                                        const NewtonSettings& s, double tol) {
  if (auto r = damped_newton(prob, seed, s, tol)) return r;
  for (int j = 0; j < s.retry_seeds; ++j) {
    const double t = kTwoPi * j / s.retry_seeds;
    const cplx start = seed + s.retry_radius * cplx(std::cos(t), std::sin(t));
    if (auto r = damped_newton(prob, start, s, tol)) return r;
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Exp: return "exp";
    case FamilyKind::PExp: return "pexp";
    case FamilyKind::AV2: return "av2";
  }
  return "unknown";
}

void FamilySpec::validate() const {
  if (kind == FamilyKind::PExp) {
    if (p < 1) fail(ErrorCode::InvalidArgument, "pexp family requires p >= 1");
  } else if (p != 0) {
    fail(ErrorCode::InvalidArgument, to_string(kind) + " family takes no p");
  }
}

void validate_params(const FamilySpec& spec, const FamilyParams& params) {
  spec.validate();
  if (spec.kind == FamilyKind::AV2) {
    if (!finite(params.alpha) || params.alpha == cplx(0.0, 0.0)) {
      fail(ErrorCode::InvalidArgument, "alpha must be finite and nonzero");
    }
    if (params.alpha * params.alpha == cplx(1.0, 0.0)) {
      fail(ErrorCode::InvalidArgument, "alpha^2 = 1 sends the second asymptotic value to infinity");
    }
    if (!finite(params.beta) || params.beta == cplx(0.0, 0.0)) {
      fail(ErrorCode::InvalidArgument, "beta must be finite and nonzero");
    }
    return;
  }
  if (!finite(params.lambda) || params.lambda == cplx(0.0, 0.0)) {
    fail(ErrorCode::InvalidArgument, "lambda must be finite and nonzero");
  }
}

double param_modulus(const FamilySpec& spec, const FamilyParams& params) {
  return spec.kind == FamilyKind::AV2 ? std::abs(params.beta) : std::abs(params.lambda);
}

cplx pexp_log_alpha(int p, cplx lambda) {
  return static_cast<double>(p) * branch_log(-lambda / static_cast<double>(p), 0) +
         static_cast<double>(p);
}

cplx pexp_alpha(int p, cplx lambda) { return std::exp(pexp_log_alpha(p, lambda)); }

cplx av2_second_asymptotic_value(cplx alpha) {
  const cplx a2 = alpha * alpha;
  if (a2 == cplx(1.0, 0.0)) fail(ErrorCode::InvalidArgument, "alpha^2 = 1");
  return a2 / (a2 - 1.0);
}

ExtendedComplex evaluate(const FamilySpec& spec, const FamilyParams& params, cplx z) {
  if (!finite(z)) fail(ErrorCode::Domain, "evaluate at infinity (essential singularity)");
  switch (spec.kind) {
    case FamilyKind::Exp: {
      const cplx t = params.lambda * z;
      if (t.real() > kExpOverflow) return ExtendedComplex::infinity();
      return std::exp(t);
    }
    case FamilyKind::PExp: {
      if (z == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
      const cplx t = pexp_log_alpha(spec.p, params.lambda) +
                     static_cast<double>(spec.p) * std::log(z) + params.lambda * z;
      if (t.real() > kExpOverflow) return ExtendedComplex::infinity();
      return std::exp(t);
    }
    case FamilyKind::AV2: {
      const cplx t = params.beta * z;
      if (t.real() > kExpOverflow) return av2_second_asymptotic_value(params.alpha);
      return mobius_apply(params.alpha, std::exp(t));
    }
  }
  return ExtendedComplex::infinity();
}

cplx derivative(const FamilySpec& spec, const FamilyParams& params, cplx z) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (spec.kind) {
    case FamilyKind::Exp: {
      const cplx t = params.lambda * z;
      if (t.real() > kExpOverflow) return {inf, 0.0};
      return params.lambda * std::exp(t);
    }
    case FamilyKind::PExp: {
      if (z == cplx(0.0, 0.0)) {
        return spec.p == 1 ? pexp_alpha(1, params.lambda) : cplx(0.0, 0.0);
      }
      const ExtendedComplex e = evaluate(spec, params, z);
      if (e.is_infinite()) return {inf, 0.0};
      return e.value() * (static_cast<double>(spec.p) / z + params.lambda);
    }
    case FamilyKind::AV2: {
      const cplx t = params.beta * z;
      if (t.real() > kExpOverflow) return {0.0, 0.0};
      const cplx u = std::exp(t);
      return params.beta * u * mobius_derivative(params.alpha, u);
    }
  }
  return {inf, 0.0};
}

SingularPoints singular_points(const FamilySpec& spec, const FamilyParams& params) {
  validate_params(spec, params);
  SingularPoints out;
  switch (spec.kind) {
    case FamilyKind::Exp:
      out.asymptotic_values = {cplx(0.0, 0.0), ExtendedComplex::infinity()};
      break;
    case FamilyKind::PExp: {
      out.asymptotic_values = {cplx(0.0, 0.0), ExtendedComplex::infinity()};
      const cplx c = -static_cast<double>(spec.p) / params.lambda;
      if (spec.p > 1) {
        out.critical_points.push_back(cplx(0.0, 0.0));
        out.critical_multiplicities.push_back(spec.p - 1);
        out.critical_values.push_back(cplx(0.0, 0.0));
      }
      out.critical_points.push_back(c);
      out.critical_multiplicities.push_back(1);
      out.critical_values.push_back(cplx(1.0, 0.0));
      break;
    }
    case FamilyKind::AV2:
      out.asymptotic_values = {cplx(0.0, 0.0), av2_second_asymptotic_value(params.alpha)};
      break;
  }
  return out;
}

FamilyParams solve_parameter(const FamilySpec& spec, cplx target, int branch,
                             std::optional<cplx> aux, std::optional<FamilyParams> seed,
                             const NewtonSettings& newton) {
  spec.validate();
  if (!finite(target) || target == cplx(0.0, 0.0)) {
    fail(ErrorCode::Domain, "parameter target is an omitted value");
  }
  switch (spec.kind) {
    case FamilyKind::Exp: {
      const cplx lambda = branch_log(target, branch);
      if (lambda == cplx(0.0, 0.0)) {
        fail(ErrorCode::Degenerate, "target 1 on branch 0 gives lambda = 0");
      }
      return FamilyParams::exponential(lambda);
    }
    case FamilyKind::PExp: {
      if (!seed) fail(ErrorCode::InvalidArgument, "pexp parameter solve needs a seed lambda");
      const double p = spec.p;
      const cplx start = seed->lambda;
      if (start == cplx(0.0, 0.0)) fail(ErrorCode::InvalidArgument, "seed lambda is zero");
      const cplx ref = branch_log(-start / p, 0);
      const cplx rhs = branch_log(target, branch);
      ScalarProblem prob{
          [=](cplx lam) { return p * log_near(-lam / p, ref) + p + lam - rhs; },
          [=](cplx lam) { return p / lam + 1.0; }};
      const double tol = newton.residual_tol * std::max(1.0, std::abs(rhs));
      auto lam = newton_with_retries(prob, start, newton, tol);
      if (!lam) fail(ErrorCode::NoConvergence, "pexp parameter Newton did not converge");
      return FamilyParams::exponential(*lam);
    }
    case FamilyKind::AV2: {
      if (!aux) fail(ErrorCode::InvalidArgument, "av2 parameter solve needs the second asymptotic value");
      const cplx v = *aux;
      if (!finite(v) || v == cplx(0.0, 0.0) || v == cplx(1.0, 0.0)) {
        fail(ErrorCode::Domain, "second asymptotic value must avoid 0, 1 and infinity");
      }
      cplx alpha = std::sqrt(v / (v - 1.0));
      if (seed && std::abs(-alpha - seed->alpha) < std::abs(alpha - seed->alpha)) alpha = -alpha;
      const ExtendedComplex u = mobius_invert(alpha, target);
      if (u.is_infinite() || u.value() == cplx(0.0, 0.0)) {
        fail(ErrorCode::Domain, "parameter target is an omitted value");
      }
      const cplx beta = branch_log(u.value(), branch);
      if (beta == cplx(0.0, 0.0)) fail(ErrorCode::Degenerate, "beta = 0");
      return FamilyParams::av2(alpha, beta);
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown family");
}

cplx inverse_branch(const FamilySpec& spec, const FamilyParams& params, cplx w, int branch,
                    cplx seed, const NewtonSettings& newton) {
  validate_params(spec, params);
  if (!finite(w)) fail(ErrorCode::Domain, "inverse_branch of infinity");
  switch (spec.kind) {
    case FamilyKind::Exp:
      if (w == cplx(0.0, 0.0)) fail(ErrorCode::Domain, "0 is omitted");
      return branch_log(w, branch) / params.lambda;
    case FamilyKind::AV2: {
      const ExtendedComplex u = mobius_invert(params.alpha, w);
      if (u.is_infinite() || u.value() == cplx(0.0, 0.0)) {
        fail(ErrorCode::Domain, "asymptotic values are omitted");
      }
      return branch_log(u.value(), branch) / params.beta;
    }
    case FamilyKind::PExp: {
      if (w == cplx(0.0, 0.0)) fail(ErrorCode::Domain, "0 is an asymptotic value");
      if (seed == cplx(0.0, 0.0)) fail(ErrorCode::InvalidArgument, "pexp inverse needs a nonzero seed");
      const double p = spec.p;
      const cplx lam = params.lambda;
      const cplx ref = branch_log(seed, 0);
      const cplx rhs = branch_log(w, branch) - pexp_log_alpha(spec.p, lam);
      ScalarProblem prob{[=](cplx z) { return p * log_near(z, ref) + lam * z - rhs; },
                         [=](cplx z) { return p / z + lam; }};
      const double tol = newton.residual_tol * std::max(1.0, std::abs(rhs));
      auto z = newton_with_retries(prob, seed, newton, tol);
      if (!z) fail(ErrorCode::NoConvergence, "pexp inverse branch Newton did not converge");
      return *z;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown family");
}

int sheet_index(const FamilySpec& spec, const FamilyParams& params, cplx z) {
  const ExtendedComplex e = evaluate(spec, params, z);
  if (e.is_infinite()) fail(ErrorCode::Domain, "sheet_index at a pole");
  const cplx w = e.value();
  cplx coord;
  cplx base;
  switch (spec.kind) {
    case FamilyKind::Exp:
      coord = params.lambda * z;
      base = branch_log(w, 0);
      break;
    case FamilyKind::AV2: {
      coord = params.beta * z;
      const ExtendedComplex u = mobius_invert(params.alpha, w);
      base = branch_log(u.value(), 0);
      break;
    }
    case FamilyKind::PExp:
      coord = static_cast<double>(spec.p) * branch_log(z, 0) + params.lambda * z +
              pexp_log_alpha(spec.p, params.lambda);
      base = branch_log(w, 0);
      break;
  }
  return static_cast<int>(std::lround((coord.imag() - base.imag()) / kTwoPi));
}

}  // namespace psf
