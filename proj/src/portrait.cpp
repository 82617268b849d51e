#include "psf/portrait.hpp"

#include <cmath>
#include <sstream>

#include "psf/error.hpp"

namespace psf {

std::string to_string(CriticalCase c) {
  switch (c) {
    case CriticalCase::None: return "none";
    case CriticalCase::PeriodicC: return "periodic_c";
    case CriticalCase::NonperiodicCAndFc: return "nonperiodic_c_and_fc";
  }
  return "unknown";
}

std::vector<int> canonical_successor(int k1, int l) {
  std::vector<int> succ;
  if (k1 < 0 || l < 1) return succ;
  const int k2 = k1 + l;
  succ.reserve(static_cast<std::size_t>(k2 + 1));
  for (int k = 0; k < k2; ++k) succ.push_back(k + 1);
  succ.push_back(k1 + 1);
  return succ;
}

namespace {

void check_block(const OrbitBlock& b, const std::string& name, bool omitted_start,
                 std::vector<std::string>& out) {
  if (b.k1 < 0) out.push_back(name + ": k1 must be nonnegative");
  if (b.l < 1) out.push_back(name + ": l must be positive");
  if (b.k1 < 0 || b.l < 1) return;
  const auto n = static_cast<std::size_t>(b.size());
  if (b.branch.size() != n) {
    std::ostringstream os;
    os << name << ": branch list has " << b.branch.size() << " entries, expected " << n;
    out.push_back(os.str());
  }
  if (b.succ.size() != n) {
    std::ostringstream os;
    os << name << ": successor list has " << b.succ.size() << " entries, expected " << n;
    out.push_back(os.str());
    return;
  }
  const std::vector<int> want = canonical_successor(b.k1, b.l);
  for (std::size_t k = 0; k < n; ++k) {
    if (b.succ[k] == want[k]) continue;
    if (k + 1 == n && b.succ[k] == 0 && omitted_start) {
      out.push_back(name + ": orbit is periodic at index 0 but its start is an omitted value");
    } else if (k + 1 == n) {
      out.push_back(name + ": broken cycle, succ(k1+l) must equal k1+1");
    } else {
      std::ostringstream os;
      os << name << ": succ(" << k << ") must equal " << k + 1;
      out.push_back(os.str());
    }
  }
}

}  // namespace

std::vector<std::string> validate_portrait(const OrbitPortrait& port) {
  std::vector<std::string> out;
  try {
    port.family.validate();
  } catch (const Error& e) {
    out.emplace_back(e.what());
    return out;
  }
  const FamilyKind kind = port.family.kind;
  check_block(port.orbit, "orbit", kind != FamilyKind::PExp, out);
  const bool shape_ok = port.orbit.k1 >= 0 && port.orbit.l >= 1 &&
                        port.orbit.branch.size() == static_cast<std::size_t>(port.orbit.size());

  switch (kind) {
    case FamilyKind::Exp:
    case FamilyKind::AV2: {
      if (port.critical_case != CriticalCase::None) {
        out.push_back(to_string(kind) + " maps have no critical points; critical_case must be absent");
      }
      if (shape_ok) {
        if (port.orbit.branch[0] != 0) {
          out.push_back("branch[0] must be 0: the origin is pinned");
        }
        const int diff = port.orbit.branch[port.k2()] - port.orbit.branch[port.k1()];
        if (port.eta != diff) {
          std::ostringstream os;
          os << "eta = " << port.eta << " disagrees with branch[k2] - branch[k1] = " << diff;
          out.push_back(os.str());
        }
      }
      if (port.eta == 0) out.push_back("eta must be nonzero (a zero winding forces a degenerate map)");
      break;
    }
    case FamilyKind::PExp: {
      if (port.second_orbit) out.push_back("pexp portraits have a single orbit");
      if (port.critical_case == CriticalCase::None) {
        out.push_back("pexp portraits need critical_case");
      } else if (port.critical_case == CriticalCase::PeriodicC) {
        if (port.orbit.k1 != 0) out.push_back("periodic critical point requires k1 = 0");
        if (port.eta != 0) out.push_back("periodic critical point: the curve is closed, eta must be 0");
      } else if (port.orbit.k1 < 1) {
        out.push_back("c is not periodic but f(c) is periodic (k1 = 0)");
      }
      const bool needs_seed = !(port.critical_case == CriticalCase::PeriodicC && port.orbit.l == 1);
      if (needs_seed && !port.lambda_seed) out.push_back("pexp portrait needs lambda_seed");
      if (port.lambda_seed && *port.lambda_seed == cplx(0.0, 0.0)) {
        out.push_back("lambda_seed must be nonzero");
      }
      break;
    }
  }

  if (kind == FamilyKind::AV2) {
    if (!port.second_orbit) {
      out.push_back("av2 portraits need second_orbit (orbit of the second asymptotic value)");
    } else {
      check_block(*port.second_orbit, "second_orbit", true, out);
    }
  } else if (kind == FamilyKind::Exp && port.second_orbit) {
    out.push_back("exp portraits have a single orbit");
  }
  return out;
}

void require_valid(const OrbitPortrait& port) {
  const auto v = validate_portrait(port);
  if (v.empty()) return;
  std::string msg = "invalid portrait:";
  for (const auto& s : v) msg += " " + s + ";";
  fail(ErrorCode::InvalidPortrait, msg);
}

int successor(const OrbitPortrait& port, int k) {
  if (k < 0 || k >= static_cast<int>(port.orbit.succ.size())) {
    fail(ErrorCode::InvalidArgument, "orbit index out of range");
  }
  return port.orbit.succ[static_cast<std::size_t>(k)];
}

std::size_t MarkedLayout::orbit_index(const OrbitPortrait& port, int k) const {
  if (k < 0 || k > port.k2()) fail(ErrorCode::InvalidArgument, "orbit index out of range");
  if (port.family.kind == FamilyKind::PExp && k == 0) {
    if (port.critical_case == CriticalCase::PeriodicC) return static_cast<std::size_t>(port.k2());
    fail(ErrorCode::InvalidArgument, "the critical point of a non-periodic orbit is not marked");
  }
  return static_cast<std::size_t>(k);
}

std::size_t MarkedLayout::second_index(int k) const {
  if (second_offset == 0) fail(ErrorCode::InvalidArgument, "portrait has no second orbit");
  const std::size_t idx = second_offset + static_cast<std::size_t>(k);
  if (k < 0 || idx >= infinity_index()) fail(ErrorCode::InvalidArgument, "second orbit index out of range");
  return idx;
}

MarkedLayout marked_layout(const OrbitPortrait& port) {
  MarkedLayout lay;
  const int K = port.k2();
  if (port.family.kind == FamilyKind::PExp) {
    lay.points.push_back({PointRole::Origin, -1});
    for (int k = 1; k <= K; ++k) lay.points.push_back({PointRole::Orbit, k});
  } else {
    for (int k = 0; k <= K; ++k) lay.points.push_back({PointRole::Orbit, k});
  }
  if (port.family.kind == FamilyKind::AV2 && port.second_orbit) {
    lay.second_offset = lay.points.size();
    for (int k = 0; k < port.second_orbit->size(); ++k) {
      lay.points.push_back({PointRole::SecondOrbit, k});
    }
  }
  lay.points.push_back({PointRole::Infinity, -1});
  lay.pinned = {0, 1, lay.points.size() - 1};
  return lay;
}

double min_spherical_gap(const MarkedConfiguration& config) {
  if (config.size() < 2) fail(ErrorCode::InvalidArgument, "min_spherical_gap needs two points");
  double best = 1.0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    for (std::size_t j = i + 1; j < config.size(); ++j) {
      best = std::min(best, spherical_distance(config.positions[i], config.positions[j]));
    }
  }
  return best;
}

double max_displacement(const MarkedConfiguration& a, const MarkedConfiguration& b) {
  if (a.size() != b.size()) fail(ErrorCode::InvalidArgument, "configurations differ in size");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, spherical_distance(a.positions[i], b.positions[i]));
  }
  return d;
}

namespace {

double distance_to_segment(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a) * std::conj(ab)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

}  // namespace

std::vector<cplx> canonical_curve(cplx a, cplx b, const std::vector<cplx>& obstacles) {
  constexpr double kClearance = 1e-8;
  bool blocked = distance_to_segment(0.0, a, b) < kClearance && a != cplx(0.0) && b != cplx(0.0);
  for (const cplx& o : obstacles) {
    if (o == a || o == b) continue;
    if (distance_to_segment(o, a, b) < kClearance) blocked = true;
  }
  if (!blocked) return {a, b};
  const cplx d = b - a;
  const cplx normal = cplx(0.0, 1.0) * d / std::abs(d);
  return {a, 0.5 * (a + b) + 0.1 * std::abs(d) * normal, b};
}

double winding_number(const OrbitPortrait& port, const MarkedConfiguration& config,
                      const FamilyParams& params) {
  if (port.family.kind == FamilyKind::PExp && port.critical_case == CriticalCase::PeriodicC) {
    return 0.0;
  }
  const MarkedLayout lay = marked_layout(port);
  const ExtendedComplex ea = config[lay.orbit_index(port, port.k1())];
  const ExtendedComplex eb = config[lay.orbit_index(port, port.k2())];
  if (ea.is_infinite() || eb.is_infinite()) fail(ErrorCode::Domain, "curve endpoint at infinity");
  const cplx a = ea.value();
  const cplx b = eb.value();
  if (a == b) fail(ErrorCode::Degenerate, "curve endpoints coincide");
  const cplx two_pi_i(0.0, kTwoPi);

  switch (port.family.kind) {
    case FamilyKind::Exp: return (params.lambda * (b - a) / two_pi_i).real();
    case FamilyKind::AV2: return (params.beta * (b - a) / two_pi_i).real();
    case FamilyKind::PExp: {
      if (a == cplx(0.0) || b == cplx(0.0)) fail(ErrorCode::Domain, "curve endpoint at 0");
      std::vector<cplx> obstacles;
      for (const auto& x : config.positions) {
        if (x.is_finite()) obstacles.push_back(x.value());
      }
      const std::vector<cplx> curve = canonical_curve(a, b, obstacles);
      // Continue log z along the polyline; each chord avoids 0 so the
      // principal log of consecutive ratios is the true increment.
      constexpr int kSamples = 64;
      cplx dlog(0.0, 0.0);
      cplx prev = a;
      const std::size_t legs = curve.size() - 1;
      for (std::size_t leg = 0; leg < legs; ++leg) {
        for (int s = 1; s <= kSamples; ++s) {
          const double t = static_cast<double>(s) / kSamples;
          const cplx cur = curve[leg] + t * (curve[leg + 1] - curve[leg]);
          dlog += std::log(cur / prev);
          prev = cur;
        }
      }
      const double p = port.family.p;
      return ((p * dlog + params.lambda * (b - a)) / two_pi_i).real();
    }
  }
  return 0.0;
}

}  // namespace psf
