#pragma once

#include <cstddef>
#include <vector>

#include "psf/families.hpp"
#include "psf/portrait.hpp"

namespace psf {

struct VerificationReport {
  double residual = 0.0;
  double min_orbit_gap = 0.0;
  bool pass = false;
  bool diverged = false;  // an orbit point overflowed to infinity
  std::vector<ExtendedComplex> orbit;         // c_0 .. c_{k1+l+1}
  std::vector<ExtendedComplex> second_orbit;  // AV2: c'_0 .. c'_{k1'+l'+1}
};

/// Iterates the realized map on its singular value(s) and checks that the
/// orbit closes up as the portrait says: residual = d_sp(c_{k1+l+1}, c_{k1+1}),
/// maximized over both orbits for AV2. A periodic critical point also adds
/// d_sp(c_l, c_0). Passes when residual < tol and the distinct orbit points
/// stay more than 1e-6 apart.
VerificationReport orbit_verify(const FamilySpec& spec, const FamilyParams& params,
                                const OrbitPortrait& port, double tol);

struct OracleSettings {
  int starts = 256;
  int max_iter = 200;
  double box = 6.0;         // odd starts fill [-box, box] per real coordinate; even
                            // starts use max(box, 2 pi (max |branch| + 1))
  double escape = 1e3;      // a start is abandoned once an unknown exceeds this
  double residual_tol = 1e-13;
};

struct OracleResult {
  FamilyParams params;
  std::vector<ExtendedComplex> positions;  // marked configuration of the solution
  int start_index = 0;        // 1-based index of the accepted start
  int converged_starts = 0;
  int matching_starts = 0;
  int distinct_matches = 0;  // matching solutions more than 1e-8 apart
  double residual = 0.0;
};

/// Solves the orbit equations E(z_k) = z_succ(k) directly by damped Newton
/// from Halton starts and returns the first solution (in start order) whose
/// recomputed sheet indices and winding number match the portrait.
/// Throws InvalidArgument for more than 8 marked points and NoConvergence
/// when no start matches.
OracleResult oracle_solve(const OrbitPortrait& port, const OracleSettings& settings = {});

/// Spherical distance between parameter records: lambda for Exp/PExp;
/// the larger of the alpha^2 and beta distances for AV2 (the map depends
/// on alpha only through alpha^2).
double parameter_distance(const FamilySpec& spec, const FamilyParams& a, const FamilyParams& b);

}  // namespace psf
