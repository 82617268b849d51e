#include "psf/pullback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "psf/error.hpp"

namespace psf {

void IterationSettings::validate() const {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be positive");
  if (max_iter < 1) fail(ErrorCode::InvalidArgument, "max_iter must be at least 1");
  if (!(min_gap_abort >= 0.0)) fail(ErrorCode::InvalidArgument, "min_gap_abort must be nonnegative");
}

std::string to_string(IterationStatus s) {
  switch (s) {
    case IterationStatus::Converged: return "CONVERGED";
    case IterationStatus::MaxIter: return "MAX_ITER";
    case IterationStatus::Degenerate: return "DEGENERATE";
    case IterationStatus::GeometryAbort: return "GEOMETRY_ABORT";
  }
  return "UNKNOWN";
}

MarkedConfiguration initial_configuration(const OrbitPortrait& port) {
  require_valid(port);
  const MarkedLayout lay = marked_layout(port);
  MarkedConfiguration config;
  config.pinned = lay.pinned;
  config.positions.assign(lay.size(), cplx(0.0, 0.0));
  config.positions[lay.pinned[0]] = cplx(0.0, 0.0);
  config.positions[lay.pinned[1]] = cplx(1.0, 0.0);
  config.positions[lay.pinned[2]] = ExtendedComplex::infinity();

  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < lay.size(); ++i) {
    if (i != lay.pinned[0] && i != lay.pinned[1] && i != lay.pinned[2]) free.push_back(i);
  }
  for (std::size_t j = 0; j < free.size(); ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(free.size());
    config.positions[free[j]] = j == 0 ? cplx(2.0, 0.0) : std::polar(2.0, t);
  }
  return config;
}

namespace {

int second_successor(const OrbitBlock& b, int k) {
  return b.succ.at(static_cast<std::size_t>(k));
}

cplx finite_at(const MarkedConfiguration& config, std::size_t i) {
  const ExtendedComplex& e = config[i];
  if (e.is_infinite()) fail(ErrorCode::Degenerate, "a free marked point reached infinity");
  return e.value();
}

// Marked index of the image of marked point i, or nullopt for infinity.
std::optional<std::size_t> image_index(const OrbitPortrait& port, const MarkedLayout& lay,
                                       std::size_t i) {
  const MarkedPoint& pt = lay.points[i];
  switch (pt.role) {
    case PointRole::Origin: return i;
    case PointRole::Orbit: return lay.orbit_index(port, successor(port, pt.orbit_index));
    case PointRole::SecondOrbit:
      return lay.second_index(second_successor(*port.second_orbit, pt.orbit_index));
    case PointRole::Infinity: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

StepOutcome pullback_step(const OrbitPortrait& port, const MarkedConfiguration& config,
                          const std::optional<FamilyParams>& prev, const NewtonSettings& newton) {
  const MarkedLayout lay = marked_layout(port);
  if (config.size() != lay.size()) {
    fail(ErrorCode::InvalidArgument, "configuration size does not match the portrait");
  }
  const FamilySpec& fam = port.family;
  const bool periodic_c = fam.kind == FamilyKind::PExp && port.critical_case == CriticalCase::PeriodicC;
  const std::size_t one_image = lay.orbit_index(port, successor(port, 1));

  FamilyParams params;
  switch (fam.kind) {
    case FamilyKind::Exp:
      params = solve_parameter(fam, finite_at(config, one_image), port.orbit.branch[1]);
      break;
    case FamilyKind::PExp: {
      if (periodic_c && port.l() == 1) {
        // c = -p/lambda must sit at 1.
        params = FamilyParams::exponential(cplx(-static_cast<double>(fam.p), 0.0));
        break;
      }
      std::optional<FamilyParams> seed = prev;
      if (!seed && port.lambda_seed) seed = FamilyParams::exponential(*port.lambda_seed);
      params = solve_parameter(fam, finite_at(config, one_image), port.orbit.branch[1], std::nullopt,
                               seed, newton);
      break;
    }
    case FamilyKind::AV2: {
      const cplx aux = finite_at(config, lay.second_index(0));
      params = solve_parameter(fam, finite_at(config, one_image), port.orbit.branch[1], aux, prev,
                               newton);
      break;
    }
  }

  MarkedConfiguration next = config;
  for (std::size_t i = 0; i < lay.size(); ++i) {
    if (i == lay.pinned[0] || i == lay.pinned[1] || i == lay.pinned[2]) continue;
    const MarkedPoint& pt = lay.points[i];
    if (periodic_c && pt.role == PointRole::Orbit && pt.orbit_index == port.k2()) {
      next.positions[i] = -static_cast<double>(fam.p) / params.lambda;
      continue;
    }
    const int branch = pt.role == PointRole::SecondOrbit
                           ? port.second_orbit->branch[static_cast<std::size_t>(pt.orbit_index)]
                           : port.orbit.branch[static_cast<std::size_t>(pt.orbit_index)];
    const std::size_t target = *image_index(port, lay, i);
    next.positions[i] =
        inverse_branch(fam, params, finite_at(config, target), branch, finite_at(config, i), newton);
  }

  StepOutcome out{params, next, {}};
  out.diag.min_gap = min_spherical_gap(next);
  if (out.diag.min_gap < kCollisionGap) {
    fail(ErrorCode::Degenerate, "pulled-back marked points collide");
  }
  out.diag.param_modulus = param_modulus(fam, params);
  out.diag.displacement = max_displacement(config, next);
  out.diag.eta_n = winding_number(port, next, params);

  double residual = 0.0;
  for (std::size_t i = 0; i < lay.size(); ++i) {
    const auto target = image_index(port, lay, i);
    if (!target) continue;
    const ExtendedComplex img = evaluate(fam, params, next[i].value());
    residual = std::max(residual, spherical_distance(img, config[*target]));
  }
  out.diag.semiconjugacy_residual = residual;
  return out;
}

IterationResult iterate_from(const OrbitPortrait& port, const MarkedConfiguration& start,
                             const IterationSettings& settings) {
  require_valid(port);
  settings.validate();
  IterationResult result;
  result.trace.initial = start;
  MarkedConfiguration config = start;
  std::optional<FamilyParams> prev;

  for (int n = 0; n < settings.max_iter; ++n) {
    StepOutcome s;
    try {
      s = pullback_step(port, config, prev, settings.newton);
    } catch (const Error& e) {
      result.status = IterationStatus::Degenerate;
      result.message = e.what();
      return result;
    }
    result.trace.steps.push_back({n, s.params, s.config, s.diag});
    if (s.diag.min_gap < settings.min_gap_abort) {
      result.status = IterationStatus::GeometryAbort;
      result.message = "minimum spherical gap fell below min_gap_abort";
      return result;
    }
    if (s.diag.displacement < settings.tol) {
      result.status = IterationStatus::Converged;
      result.params = s.params;
      return result;
    }
    prev = s.params;
    config = std::move(s.config);
  }
  result.status = IterationStatus::MaxIter;
  result.message = "max_iter reached";
  return result;
}

IterationResult iterate(const OrbitPortrait& port, const IterationSettings& settings) {
  return iterate_from(port, initial_configuration(port), settings);
}

CompactnessReport compactness_bound_check(const IterationTrace& trace, const OrbitPortrait& port) {
  CompactnessReport rep;
  if (trace.steps.empty()) fail(ErrorCode::InvalidArgument, "empty trace");
  const MarkedLayout lay = marked_layout(port);
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double kSlack = 1e-12;

  for (const TraceStep& s : trace.steps) {
    rep.max_param_modulus = std::max(rep.max_param_modulus, s.diag.param_modulus);
  }

  const FamilySpec& fam = port.family;
  if (fam.kind == FamilyKind::PExp && port.critical_case == CriticalCase::PeriodicC) {
    const std::size_t ic = lay.orbit_index(port, port.k2());
    double lo = inf;
    double hi = 0.0;
    for (const TraceStep& s : trace.steps) {
      const double r = s.config[ic].is_finite() ? std::abs(s.config[ic].value()) : inf;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    const double p = fam.p;
    rep.kappa = p / hi;
    rep.K = hi;
    rep.bound = lo > 0.0 ? p / lo : inf;
  } else {
    const std::size_t ia = lay.orbit_index(port, port.k1());
    const std::size_t ib = lay.orbit_index(port, port.k2());
    double kappa = inf;
    double K = 0.0;
    for (const TraceStep& s : trace.steps) {
      if (s.config[ia].is_infinite() || s.config[ib].is_infinite()) {
        kappa = 0.0;
        K = inf;
        continue;
      }
      const double a = std::abs(s.config[ia].value());
      const double b = std::abs(s.config[ib].value());
      const double d = std::abs(s.config[ib].value() - s.config[ia].value());
      kappa = std::min({kappa, s.diag.param_modulus, b, d});
      if (a > 0.0) kappa = std::min(kappa, a);
      K = std::max({K, a, b, d});
    }
    rep.kappa = kappa;
    rep.K = K;
    const double eta = std::abs(static_cast<double>(port.eta));
    if (kappa <= 0.0) {
      rep.bound = inf;
    } else if (fam.kind == FamilyKind::PExp) {
      rep.bound = (kTwoPi * eta + std::log(K / kappa) + 2.0 * kTwoPi) / kappa;
    } else {
      rep.bound = kTwoPi * eta / kappa;
    }
  }

  rep.vacuous = !std::isfinite(rep.bound);
  rep.satisfied = true;
  for (const TraceStep& s : trace.steps) {
    if (s.diag.param_modulus > rep.bound * (1.0 + kSlack)) rep.satisfied = false;
  }
  return rep;
}

}  // namespace psf
