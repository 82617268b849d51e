#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psf/sphere.hpp"

namespace psf {

enum class FamilyKind { Exp, PExp, AV2 };

std::string to_string(FamilyKind kind);

/// Which holomorphic family a map belongs to.
///   Exp:  e^{lambda z}
///   PExp: alpha z^p e^{lambda z}, alpha = (-lambda/p)^p e^p
///   AV2:  alpha e^{beta z} / ((alpha - 1/alpha) e^{beta z} + 1/alpha)
struct FamilySpec {
  FamilyKind kind = FamilyKind::Exp;
  int p = 0;  // PExp only

  static FamilySpec exponential() { return {FamilyKind::Exp, 0}; }
  static FamilySpec polynomial_exponential(int p) { return {FamilyKind::PExp, p}; }
  static FamilySpec two_asymptotic_values() { return {FamilyKind::AV2, 0}; }

  /// Throws InvalidArgument when p does not match the kind.
  void validate() const;

  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

/// Parameters of a family member. Exp and PExp use `lambda`; AV2 uses
/// `alpha` and `beta`. PExp never stores its multiplier, see pexp_alpha().
struct FamilyParams {
  cplx lambda{0.0, 0.0};
  cplx alpha{0.0, 0.0};
  cplx beta{0.0, 0.0};

  static FamilyParams exponential(cplx lambda) { return {lambda, {}, {}}; }
  static FamilyParams av2(cplx alpha, cplx beta) { return {{}, alpha, beta}; }

  friend bool operator==(const FamilyParams&, const FamilyParams&) = default;
};

/// Throws InvalidArgument when params are not admissible for spec.
void validate_params(const FamilySpec& spec, const FamilyParams& params);

/// Modulus of the parameter that controls the size of fundamental domains:
/// |lambda| for Exp/PExp, |beta| for AV2.
double param_modulus(const FamilySpec& spec, const FamilyParams& params);

/// log alpha = p * branch_log(-lambda/p, 0) + p.
cplx pexp_log_alpha(int p, cplx lambda);
cplx pexp_alpha(int p, cplx lambda);

/// alpha^2 / (alpha^2 - 1), the non-zero asymptotic value of the AV2 map.
cplx av2_second_asymptotic_value(cplx alpha);

struct NewtonSettings {
  double step_cap = 10.0;
  int max_iter = 100;
  double residual_tol = 1e-13;
  int retry_seeds = 8;
  double retry_radius = 0.1;
};

ExtendedComplex evaluate(const FamilySpec& spec, const FamilyParams& params, cplx z);

cplx derivative(const FamilySpec& spec, const FamilyParams& params, cplx z);

struct SingularPoints {
  std::vector<ExtendedComplex> asymptotic_values;
  std::vector<cplx> critical_points;
  std::vector<int> critical_multiplicities;
  std::vector<ExtendedComplex> critical_values;
};

SingularPoints singular_points(const FamilySpec& spec, const FamilyParams& params);

/// Finds parameters so that the map sends its normalization point to
/// `target` on the requested logarithm branch.
///
/// Exp:  e^lambda = target, lambda = branch_log(target, branch).
/// PExp: E(1) = target, solved by damped Newton in lambda from `seed`; the
///       logarithm of -lambda/p is continued from the seed's determination.
/// AV2:  alpha^2 = aux / (aux - 1) where aux is the position of the second
///       asymptotic value; the root nearer seed->alpha is taken when a seed
///       is given, the principal root otherwise. Then
///       beta = branch_log(mobius_invert(alpha, target), branch).
FamilyParams solve_parameter(const FamilySpec& spec, cplx target, int branch,
                             std::optional<cplx> aux = std::nullopt,
                             std::optional<FamilyParams> seed = std::nullopt,
                             const NewtonSettings& newton = {});

/// The preimage of w on sheet `branch`.
///
/// Exp and AV2 use closed forms. PExp runs damped Newton on
/// p log z + lambda z + log alpha - branch_log(w, branch) with log z
/// continued from the seed, retrying from perturbed seeds on failure.
cplx inverse_branch(const FamilySpec& spec, const FamilyParams& params, cplx w, int branch,
                    cplx seed, const NewtonSettings& newton = {});

/// Sheet index of z as a preimage of evaluate(z): the integer m with
/// (log-coordinate of z) = branch_log(evaluate(z), m). For PExp the
/// logarithm of z is the [0, 2pi) determination.
int sheet_index(const FamilySpec& spec, const FamilyParams& params, cplx z);

}  // namespace psf
