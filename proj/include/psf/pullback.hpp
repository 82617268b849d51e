#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psf/configuration.hpp"
#include "psf/families.hpp"
#include "psf/portrait.hpp"

namespace psf {

struct IterationSettings {
  double tol = 1e-11;            // max spherical displacement that counts as converged
  int max_iter = 500;
  double min_gap_abort = 1e-8;   // bounded-geometry abort threshold
  NewtonSettings newton;

  void validate() const;
};

// Pulled-back points closer than this (spherically) are a collision.
inline constexpr double kCollisionGap = 1e-13;

struct StepDiagnostics {
  double min_gap = 0.0;
  double param_modulus = 0.0;
  double eta_n = 0.0;
  double displacement = 0.0;
  double semiconjugacy_residual = 0.0;  // max d_sp(E_n(new[k]), old[succ(k)])
};

/// Step n solves E_n from the level-n configuration and pulls it back to
/// level n+1; `config` is the level-n+1 configuration.
struct TraceStep {
  int step = 0;
  FamilyParams params;
  MarkedConfiguration config;
  StepDiagnostics diag;
};

struct IterationTrace {
  MarkedConfiguration initial;
  std::vector<TraceStep> steps;
};

enum class IterationStatus { Converged, MaxIter, Degenerate, GeometryAbort };

std::string to_string(IterationStatus s);

struct IterationResult {
  IterationStatus status = IterationStatus::MaxIter;
  std::optional<FamilyParams> params;
  IterationTrace trace;
  std::string message;  // why the run stopped, when not converged
};

/// 0, 1, infinity at the pinned indices; remaining points on |z| = 2 at
/// angles 2 pi j / n in declaration order.
MarkedConfiguration initial_configuration(const OrbitPortrait& port);

struct StepOutcome {
  FamilyParams params;
  MarkedConfiguration config;
  StepDiagnostics diag;
};

/// One Thurston pullback. `prev` seeds the PExp parameter solve and picks
/// the AV2 square root; without it the portrait's lambda_seed (PExp) or the
/// principal root (AV2) is used.
///
/// Throws Degenerate when two pulled-back points collide, and passes through
/// Domain / NoConvergence from the parameter solve or inverse branches.
StepOutcome pullback_step(const OrbitPortrait& port, const MarkedConfiguration& config,
                          const std::optional<FamilyParams>& prev,
                          const NewtonSettings& newton = {});

/// Runs pullback steps from initial_configuration until the displacement
/// drops below tol, geometry degenerates, or max_iter steps have run.
IterationResult iterate(const OrbitPortrait& port, const IterationSettings& settings = {});

/// Same, from a caller-supplied start.
IterationResult iterate_from(const OrbitPortrait& port, const MarkedConfiguration& start,
                             const IterationSettings& settings = {});

struct CompactnessReport {
  double kappa = 0.0;
  double K = 0.0;
  double bound = 0.0;
  double max_param_modulus = 0.0;
  bool vacuous = false;   // kappa == 0, bound is infinite
  bool satisfied = false;
};

/// Checks every |lambda_n| (|beta_n| for AV2) of the trace against the a
/// priori bound built from the trace's own extremes:
///   kappa = min of |lambda_n|, |c_{k1,n+1}| (when nonzero), |c_{k2,n+1}|, |dc|
///   K     = max of |c_{k1,n+1}|, |c_{k2,n+1}|, |dc|
///   Exp, AV2:  2 pi |eta| / kappa
///   PExp:      (2 pi |eta| + log(K/kappa) + 4 pi) / kappa
/// With a periodic critical point the critical orbit itself bounds lambda:
/// kappa = p / max|c_n| and the bound is p / min|c_n|.
CompactnessReport compactness_bound_check(const IterationTrace& trace, const OrbitPortrait& port);

}  // namespace psf
