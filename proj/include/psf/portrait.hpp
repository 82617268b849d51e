#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "psf/configuration.hpp"
#include "psf/families.hpp"

namespace psf {

enum class CriticalCase { None, PeriodicC, NonperiodicCAndFc };

std::string to_string(CriticalCase c);

/// One preperiodic singular orbit c_0 -> c_1 -> ... -> c_{k1+l} -> c_{k1+1}.
struct OrbitBlock {
  int k1 = 0;
  int l = 1;
  std::vector<int> branch;  // sheet index used to pull back c_k, one per orbit point
  std::vector<int> succ;    // successor of each orbit index

  int size() const noexcept { return k1 + l + 1; }
  int k2() const noexcept { return k1 + l; }
};

/// succ(k) = k+1 for k < k1+l and succ(k1+l) = k1+1.
std::vector<int> canonical_successor(int k1, int l);

/// Combinatorial description of a post-singularly finite topological map.
///
/// For Exp and AV2 the first orbit is the orbit of 0 (c_0 = 0, c_1 = 1).
/// For PExp it is the orbit of the critical point c (c_1 = 1); with
/// PeriodicC the critical point is c_{l} and k1 must be 0.
/// AV2 carries the orbit of the second asymptotic value in `second_orbit`.
struct OrbitPortrait {
  FamilySpec family;
  OrbitBlock orbit;
  int eta = 0;
  CriticalCase critical_case = CriticalCase::None;
  std::optional<OrbitBlock> second_orbit;
  std::optional<cplx> lambda_seed;  // PExp: starting parameter of the first pullback

  int k1() const noexcept { return orbit.k1; }
  int l() const noexcept { return orbit.l; }
  int k2() const noexcept { return orbit.k2(); }
};

/// Empty when the portrait is well formed; otherwise one message per defect.
std::vector<std::string> validate_portrait(const OrbitPortrait& port);

/// Throws InvalidPortrait listing all violations.
void require_valid(const OrbitPortrait& port);

/// Successor of first-orbit index k. Throws InvalidArgument when out of range.
int successor(const OrbitPortrait& port, int k);

enum class PointRole { Origin, Orbit, SecondOrbit, Infinity };

struct MarkedPoint {
  PointRole role;
  int orbit_index;  // index within its orbit; -1 for Origin and Infinity
};

/// How the portrait's post-singular set is laid out in a configuration:
///   Exp:  [c_0 = 0, c_1 = 1, c_2 .. c_K, inf]
///   PExp: [0, c_1 = 1, c_2 .. c_K, inf]
///   AV2:  [c_0 = 0, c_1 = 1, c_2 .. c_K, c'_0 .. c'_K', inf]
struct MarkedLayout {
  std::vector<MarkedPoint> points;
  std::array<std::size_t, 3> pinned{};
  std::size_t second_offset = 0;

  std::size_t size() const noexcept { return points.size(); }
  std::size_t infinity_index() const noexcept { return points.size() - 1; }
  /// Marked index of first-orbit point c_k. Throws InvalidArgument if c_k is
  /// not marked (the critical point of a non-periodic PExp orbit).
  std::size_t orbit_index(const OrbitPortrait& port, int k) const;
  std::size_t second_index(int k) const;
};

MarkedLayout marked_layout(const OrbitPortrait& port);

/// Polyline used as the curve joining c_{k1} and c_{k2}: the straight segment,
/// or a two-segment detour through the midpoint offset perpendicularly by
/// 0.1 |b - a| when the segment passes within 1e-8 of 0 or an obstacle.
std::vector<cplx> canonical_curve(cplx a, cplx b, const std::vector<cplx>& obstacles);

/// Winding value of the image of the curve joining c_{k1} and c_{k2} at the
/// pulled-back level, computed from the map with parameters `params`:
///   Exp:  lambda (c_{k2} - c_{k1}) / (2 pi i)
///   AV2:  beta (c_{k2} - c_{k1}) / (2 pi i)
///   PExp: (p * (log c_{k2} - log c_{k1}) + lambda (c_{k2} - c_{k1})) / (2 pi i)
///         with the logarithm continued along the canonical curve.
/// A periodic critical orbit has coincident endpoints and winding 0.
/// The result is real up to rounding; its imaginary part is discarded.
double winding_number(const OrbitPortrait& port, const MarkedConfiguration& config,
                      const FamilyParams& params);

}  // namespace psf
