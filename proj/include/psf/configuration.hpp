#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "psf/sphere.hpp"

namespace psf {

/// Positions of the marked points at one level of the iteration. Indices
/// follow the portrait's marked layout; `pinned` holds the indices of the
/// points fixed at 0, 1 and infinity.
struct MarkedConfiguration {
  std::vector<ExtendedComplex> positions;
  std::array<std::size_t, 3> pinned{0, 1, 2};

  std::size_t size() const noexcept { return positions.size(); }
  const ExtendedComplex& operator[](std::size_t i) const { return positions.at(i); }
};

/// Minimum pairwise spherical distance. Throws InvalidArgument for fewer
/// than two points.
double min_spherical_gap(const MarkedConfiguration& config);

/// Maximum spherical distance between same-index points of two
/// configurations of equal size.
double max_displacement(const MarkedConfiguration& a, const MarkedConfiguration& b);

}  // namespace psf
