#include "psf/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "psf/error.hpp"
#include "psf/pullback.hpp"

namespace psf {

namespace {

// Orbit c_0 .. c_{steps} of the realized map from c_0 = start.
std::vector<ExtendedComplex> forward_orbit(const FamilySpec& spec, const FamilyParams& params,
                                           cplx start, int steps, bool& diverged) {
  std::vector<ExtendedComplex> orbit{start};
  for (int k = 0; k < steps; ++k) {
    const ExtendedComplex& c = orbit.back();
    if (c.is_infinite()) {
      diverged = true;
      orbit.push_back(ExtendedComplex::infinity());
      continue;
    }
    const ExtendedComplex next = evaluate(spec, params, c.value()).normalized();
    if (next.is_infinite()) diverged = true;
    orbit.push_back(next);
  }
  return orbit;
}

double pairwise_gap(const std::vector<ExtendedComplex>& pts) {
  double g = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      g = std::min(g, spherical_distance(pts[i], pts[j]));
    }
  }
  return g;
}

}  // namespace

VerificationReport orbit_verify(const FamilySpec& spec, const FamilyParams& params,
                                const OrbitPortrait& port, double tol) {
  validate_params(spec, params);
  if (!(spec == port.family)) fail(ErrorCode::InvalidArgument, "parameters and portrait disagree on the family");
  require_valid(port);
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be positive");

  VerificationReport rep;
  const int K = port.k2();
  const cplx start = spec.kind == FamilyKind::PExp ? -static_cast<double>(spec.p) / params.lambda
                                                   : cplx(0.0, 0.0);
  rep.orbit = forward_orbit(spec, params, start, K + 1, rep.diverged);
  rep.residual = spherical_distance(rep.orbit[static_cast<std::size_t>(K + 1)],
                                    rep.orbit[static_cast<std::size_t>(port.k1() + 1)]);
  const bool periodic_c = spec.kind == FamilyKind::PExp && port.critical_case == CriticalCase::PeriodicC;
  if (periodic_c) {
    rep.residual = std::max(rep.residual, spherical_distance(rep.orbit[static_cast<std::size_t>(K)],
                                                             rep.orbit[0]));
  }
  std::vector<ExtendedComplex> distinct(rep.orbit.begin(),
                                        rep.orbit.begin() + (periodic_c ? K : K + 1));

  if (spec.kind == FamilyKind::AV2) {
    const OrbitBlock& b = *port.second_orbit;
    rep.second_orbit = forward_orbit(spec, params, av2_second_asymptotic_value(params.alpha),
                                     b.k2() + 1, rep.diverged);
    rep.residual = std::max(rep.residual,
                            spherical_distance(rep.second_orbit[static_cast<std::size_t>(b.k2() + 1)],
                                               rep.second_orbit[static_cast<std::size_t>(b.k1 + 1)]));
    distinct.insert(distinct.end(), rep.second_orbit.begin(), rep.second_orbit.begin() + b.k2() + 1);
  }
  rep.min_orbit_gap = pairwise_gap(distinct);
  rep.pass = !rep.diverged && rep.residual < tol && rep.min_orbit_gap > 1e-6;
  return rep;
}

double parameter_distance(const FamilySpec& spec, const FamilyParams& a, const FamilyParams& b) {
  if (spec.kind == FamilyKind::AV2) {
    return std::max(spherical_distance(a.alpha * a.alpha, b.alpha * b.alpha),
                    spherical_distance(a.beta, b.beta));
  }
  return spherical_distance(a.lambda, b.lambda);
}

namespace {

using Vec = Eigen::VectorXcd;

constexpr std::array<int, 20> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                         31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

// Unknowns and equations of the orbit system for one portrait.
class OrbitSystem {
 public:
  explicit OrbitSystem(const OrbitPortrait& port)
      : port_(port), lay_(marked_layout(port)), K_(port.k2()) {
    Kb_ = port.second_orbit ? port.second_orbit->k2() : -1;
    n_ = port.family.kind == FamilyKind::AV2 ? 2 + (K_ - 1) + (Kb_ + 1) : 1 + (K_ - 1);
  }

  int size() const { return n_; }

  // Position of first-orbit point k (k >= 0) from the unknown vector.
  cplx first(const Vec& x, int k) const {
    if (k == 0) return port_.family.kind == FamilyKind::PExp ? -double(port_.family.p) / x[0] : 0.0;
    if (k == 1) return 1.0;
    return x[offset() + k - 2];
  }
  cplx second(const Vec& x, int k) const { return x[offset() + K_ - 1 + k]; }

  Vec residual(const Vec& x) const {
    Vec F(n_);
    int r = 0;
    const FamilyKind kind = port_.family.kind;
    const bool periodic_c = kind == FamilyKind::PExp && port_.critical_case == CriticalCase::PeriodicC;
    for (int k = 1; k <= K_; ++k) {
      const cplx w = first(x, port_.orbit.succ[static_cast<std::size_t>(k)]);
      if (periodic_c && k == K_) {
        F[r++] = x[0] * first(x, K_) + double(port_.family.p);
      } else {
        F[r++] = equation(x, first(x, k), w);
      }
    }
    if (kind == FamilyKind::AV2) {
      const OrbitBlock& b = *port_.second_orbit;
      for (int k = 0; k <= Kb_; ++k) {
        F[r++] = equation(x, second(x, k), second(x, b.succ[static_cast<std::size_t>(k)]));
      }
      F[r++] = second(x, 0) * (x[0] - 1.0) - x[0];
    }
    return F;
  }

  FamilyParams params(const Vec& x) const {
    if (port_.family.kind == FamilyKind::AV2) return FamilyParams::av2(std::sqrt(x[0]), x[1]);
    return FamilyParams::exponential(x[0]);
  }

  MarkedConfiguration configuration(const Vec& x) const {
    MarkedConfiguration c;
    c.pinned = lay_.pinned;
    for (const MarkedPoint& pt : lay_.points) {
      switch (pt.role) {
        case PointRole::Origin: c.positions.emplace_back(0.0); break;
        case PointRole::Orbit:
          c.positions.emplace_back(port_.family.kind == FamilyKind::PExp &&
                                           port_.critical_case == CriticalCase::PeriodicC &&
                                           pt.orbit_index == K_
                                       ? first(x, K_)
                                       : first(x, pt.orbit_index));
          break;
        case PointRole::SecondOrbit: c.positions.emplace_back(second(x, pt.orbit_index)); break;
        case PointRole::Infinity: c.positions.push_back(ExtendedComplex::infinity()); break;
      }
    }
    return c;
  }

 private:
  int offset() const { return port_.family.kind == FamilyKind::AV2 ? 2 : 1; }

  // Zero exactly when the map sends z to w, written without poles.
  cplx equation(const Vec& x, cplx z, cplx w) const {
    switch (port_.family.kind) {
      case FamilyKind::Exp: return std::exp(x[0] * z) - w;
      case FamilyKind::PExp: {
        const int p = port_.family.p;
        const cplx lam = x[0];
        cplx a = std::exp(double(p));
        for (int i = 0; i < p; ++i) a *= -lam / double(p) * z;
        return a * std::exp(lam * z) - w;
      }
      case FamilyKind::AV2: {
        const cplx A = x[0];
        const cplx u = std::exp(x[1] * z);
        return A * u - w * ((A - 1.0) * u + 1.0);
      }
    }
    return {};
  }

  const OrbitPortrait& port_;
  MarkedLayout lay_;
  int K_;
  int Kb_;
  int n_;
};

bool finite_vec(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
  }
  return true;
}

std::optional<Vec> newton(const OrbitSystem& sys, Vec x, const OracleSettings& s) {
  const int n = sys.size();
  for (int it = 0; it < s.max_iter; ++it) {
    const Vec F = sys.residual(x);
    if (!finite_vec(F)) return std::nullopt;
    if (F.norm() < s.residual_tol) return x;
    Eigen::MatrixXcd J(n, n);
    for (int j = 0; j < n; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      J.col(j) = (sys.residual(xp) - sys.residual(xm)) / (2.0 * h);
    }
    if (!J.allFinite()) return std::nullopt;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(J);
    if (!lu.isInvertible()) return std::nullopt;
    Vec d = lu.solve(-F);
    const double nd = d.norm();
    if (!std::isfinite(nd)) return std::nullopt;
    if (nd > 1.0) d /= nd;
    x += d;
    if (x.cwiseAbs().maxCoeff() > s.escape) return std::nullopt;
  }
  const Vec F = sys.residual(x);
  if (finite_vec(F) && F.norm() < s.residual_tol) return x;
  return std::nullopt;
}

bool matches(const OrbitPortrait& port, const OrbitSystem& sys, const Vec& x) {
  const FamilySpec& spec = port.family;
  const FamilyParams params = sys.params(x);
  try {
    validate_params(spec, params);
    if (param_modulus(spec, params) < 1e-8) return false;
    const MarkedConfiguration config = sys.configuration(x);
    if (min_spherical_gap(config) < 1e-8) return false;
    const double eta = winding_number(port, config, params);
    if (std::abs(eta - std::round(eta)) > 1e-6 || std::lround(eta) != port.eta) return false;

    const bool periodic_c = spec.kind == FamilyKind::PExp && port.critical_case == CriticalCase::PeriodicC;
    // PExp sheets away from c_1 depend on how log z is continued, so only
    // the sheet fixing lambda is compared there.
    const int last = spec.kind == FamilyKind::PExp ? 1 : port.k2();
    for (int k = 1; k <= last; ++k) {
      if (periodic_c && k == port.k2()) continue;
      if (sheet_index(spec, params, sys.first(x, k)) != port.orbit.branch[static_cast<std::size_t>(k)]) {
        return false;
      }
    }
    if (spec.kind == FamilyKind::AV2) {
      const OrbitBlock& b = *port.second_orbit;
      for (int k = 0; k <= b.k2(); ++k) {
        if (sheet_index(spec, params, sys.second(x, k)) != b.branch[static_cast<std::size_t>(k)]) {
          return false;
        }
      }
    }
  } catch (const Error&) {
    return false;
  }
  return true;
}

}  // namespace

OracleResult oracle_solve(const OrbitPortrait& port, const OracleSettings& settings) {
  require_valid(port);
  if (marked_layout(port).size() > 8) {
    fail(ErrorCode::InvalidArgument, "oracle_solve handles at most 8 marked points");
  }
  const OrbitSystem sys(port);
  const int n = sys.size();
  if (2 * n > static_cast<int>(kPrimes.size())) fail(ErrorCode::InvalidArgument, "too many unknowns");

  // Sheet m puts log-coordinates near 2 pi i m, so every other start is
  // drawn from a box widened by the largest branch index.
  int max_sheet = 0;
  for (int b : port.orbit.branch) max_sheet = std::max(max_sheet, std::abs(b));
  if (port.second_orbit) {
    for (int b : port.second_orbit->branch) max_sheet = std::max(max_sheet, std::abs(b));
  }
  const double wide = std::max(settings.box, kTwoPi * (max_sheet + 1));

  std::vector<std::optional<Vec>> runs;
  for (int i = 0; i < settings.starts; ++i) {
    const double box = i % 2 == 0 ? settings.box : wide;
    Vec x(n);
    for (int j = 0; j < n; ++j) {
      const double re = halton(i / 2 + 1, kPrimes[static_cast<std::size_t>(2 * j)]);
      const double im = halton(i / 2 + 1, kPrimes[static_cast<std::size_t>(2 * j + 1)]);
      x[j] = cplx((2.0 * re - 1.0) * box, (2.0 * im - 1.0) * box);
    }
    runs.push_back(newton(sys, x, settings));
  }

  OracleResult best;
  bool found = false;
  std::vector<FamilyParams> classes;
  for (int s = 1; s <= settings.starts; ++s) {
    const auto& sol = runs[static_cast<std::size_t>(s - 1)];
    if (!sol) continue;
    ++best.converged_starts;
    if (!matches(port, sys, *sol)) continue;
    ++best.matching_starts;
    const FamilyParams params = sys.params(*sol);
    if (std::none_of(classes.begin(), classes.end(), [&](const FamilyParams& c) {
          return parameter_distance(port.family, c, params) < 1e-8;
        })) {
      classes.push_back(params);
    }
    if (found) continue;
    found = true;
    best.params = params;
    best.positions = sys.configuration(*sol).positions;
    best.start_index = s;
    best.residual = sys.residual(*sol).norm();
  }
  best.distinct_matches = static_cast<int>(classes.size());
  if (!found) fail(ErrorCode::NoConvergence, "no oracle start matched the portrait");
  return best;
}

}  // namespace psf
