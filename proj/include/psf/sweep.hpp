#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psf/portrait.hpp"
#include "psf/pullback.hpp"

namespace psf {

/// branch[index] takes every value in [lo, hi].
struct BranchRange {
  int index = 0;
  int lo = 0;
  int hi = 0;
};

struct SweepSpec {
  std::vector<BranchRange> branches;
  std::optional<std::pair<int, int>> eta;  // inclusive
  int jobs = 1;
  bool cross_check = false;  // also run oracle_solve per row
};

inline constexpr long kMaxSweepRows = 10'000;

struct SweepRow {
  OrbitPortrait portrait;
  std::vector<std::string> violations;  // nonempty: the row was not run
  IterationResult result;
  bool oracle_ok = false;
  double oracle_distance = -1.0;  // spherical, negative when unavailable
};

/// Portraits of the sweep in row order: the last branch range varies
/// fastest, eta slowest. For Exp and AV2 the winding is tied to the
/// branches (eta = branch[k2] - branch[k1]); an eta range therefore sets
/// branch[k2] and an unswept eta follows the branches.
/// Throws InvalidArgument for out-of-range indices or more than
/// kMaxSweepRows rows.
std::vector<OrbitPortrait> expand_sweep(const OrbitPortrait& templ, const SweepSpec& spec);

/// Runs every row on a pool of spec.jobs workers. Rows come back in
/// expansion order whatever the scheduling.
std::vector<SweepRow> run_sweep(const OrbitPortrait& templ, const SweepSpec& spec,
                                const IterationSettings& settings);

}  // namespace psf
