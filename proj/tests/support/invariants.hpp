#pragma once

// Step-by-step invariants of a pullback trace, recomputed from the raw data.

#include <algorithm>
#include <cmath>

#include "psf/pullback.hpp"

namespace oracle {

struct TraceInvariants {
  bool pinned = true;             // 0, 1, infinity held bitwise at their slots
  double semiconjugacy = 0.0;     // max d_sp(E_n(new[k]), old[succ(k)])
  double winding_drift = 0.0;     // max |eta_n - round(eta_n)|
  int winding_mismatches = 0;     // steps with round(eta_n) != eta
  double reported_semiconjugacy = 0.0;
};

inline bool same_bits(const psf::ExtendedComplex& a, const psf::ExtendedComplex& b) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
  return a.value().real() == b.value().real() && a.value().imag() == b.value().imag();
}

inline TraceInvariants trace_invariants(const psf::OrbitPortrait& port, const psf::IterationTrace& trace) {
  using namespace psf;
  const MarkedLayout lay = marked_layout(port);
  const bool periodic_c = port.critical_case == CriticalCase::PeriodicC;
  TraceInvariants out;
  const MarkedConfiguration* prev = &trace.initial;
  for (const TraceStep& s : trace.steps) {
    const MarkedConfiguration& c = s.config;
    out.pinned = out.pinned && same_bits(c[lay.pinned[0]], 0.0) && same_bits(c[lay.pinned[1]], 1.0) &&
                 c[lay.pinned[2]].is_infinite();
    for (std::size_t i = 0; i < lay.size(); ++i) {
      const MarkedPoint& pt = lay.points[i];
      if (pt.role == PointRole::Infinity || pt.role == PointRole::Origin) continue;
      std::size_t img;
      if (pt.role == PointRole::SecondOrbit) {
        img = lay.second_index(port.second_orbit->succ[static_cast<std::size_t>(pt.orbit_index)]);
      } else {
        if (periodic_c && pt.orbit_index == port.k2()) continue;  // c is fixed, not pulled back
        img = lay.orbit_index(port, port.orbit.succ[static_cast<std::size_t>(pt.orbit_index)]);
      }
      const ExtendedComplex v = evaluate(port.family, s.params, c[i].value());
      out.semiconjugacy = std::max(out.semiconjugacy, spherical_distance(v, (*prev)[img]));
    }
    out.reported_semiconjugacy = std::max(out.reported_semiconjugacy, s.diag.semiconjugacy_residual);
    out.winding_drift = std::max(out.winding_drift, std::abs(s.diag.eta_n - std::round(s.diag.eta_n)));
    if (std::lround(s.diag.eta_n) != port.eta) ++out.winding_mismatches;
    prev = &c;
  }
  return out;
}

}  // namespace oracle
