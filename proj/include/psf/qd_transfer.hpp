#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "psf/families.hpp"
#include "psf/quadrature.hpp"

namespace psf {

/// phi(w) dw^2 with phi(w) = sum_j a_j / (w - p_j).
///
/// Integrability at infinity needs sum a_j = 0 and sum a_j p_j = 0, which
/// makes phi = O(|w|^-3). The zero differential has no poles.
struct QuadraticDifferential {
  std::vector<cplx> poles;
  std::vector<cplx> coeffs;

  bool is_zero() const noexcept;
  cplx operator()(cplx w) const;

  /// Throws InvalidArgument on size mismatch, repeated or non-finite poles,
  /// or violated integrability (relative 1e-9).
  void validate() const;

  QuadraticDifferential scaled(cplx c) const;
  /// Sum of two differentials; shared poles are merged.
  QuadraticDifferential plus(const QuadraticDifferential& other) const;

  /// |phi(w)| |w|^3 at |w| = 1e3 over |w| = 1e2 along a fixed ray. Near 1
  /// when phi decays cubically; the implementation requires it within [1/2, 2].
  double decay_ratio() const;
};

/// Basis of integrable differentials with simple poles on the finite
/// marked points (0 and 1 first, then the rest): element j has poles
/// {p_0, p_1, p_j} with a_j = 1, a_1 = (p_0 - p_j)/(p_1 - p_0), a_0 = -1 - a_1.
/// Its size is (#finite points) - 2.
std::vector<QuadraticDifferential> canonical_basis(const std::vector<cplx>& finite_points);

/// Finite marked points used for contraction experiments. A set with only
/// 0 and 1 has no nonzero differential, so 2 is appended.
std::vector<cplx> contraction_points(const std::vector<cplx>& finite_points);

struct QuadSettings {
  double rel_tol = 1e-6;       // target
  double fail_rel_tol = 1e-4;  // worse than this is a Quadrature error
  double tail_length = 36.0;   // decay lengths integrated past the outermost singularity
  std::size_t max_evals = 20'000'000;
};

struct NormEstimate {
  double value = 0.0;
  double error = 0.0;
  std::size_t evals = 0;
};

/// ||q|| = area integral of |phi| over the plane, in log-polar coordinates.
NormEstimate qd_norm(const QuadraticDifferential& q, const QuadSettings& settings = {});

/// Principal Wright omega: the w with w + Log w = y.
cplx wright_omega(cplx y);

struct PushForwardValue {
  cplx value;
  cplx tail;  // truncation M sum minus truncation 2M sum
};

/// phi(z) = sum over E(w) = z of phi~(w) / E'(w)^2, with preimages indexed
/// by m in [-M, M] (Exp, AV2) or p(2M+1) consecutive Wright-omega branches
/// (PExp). z must avoid 0, infinity, the family's singular values and the
/// images of the poles.
cplx push_forward_at(const QuadraticDifferential& q, const FamilySpec& spec,
                     const FamilyParams& params, cplx z, int truncation);

PushForwardValue push_forward_with_tail(const QuadraticDifferential& q, const FamilySpec& spec,
                                        const FamilyParams& params, cplx z, int truncation);

/// Preimages of z = e^zeta used by the truncated sum, with dw/dzeta.
struct Preimage {
  cplx w;
  cplx dw_dzeta;
};
std::vector<Preimage> preimages(const FamilySpec& spec, const FamilyParams& params, cplx zeta,
                                int truncation);

struct ContractionReport {
  int truncation = 0;
  NormEstimate source;
  NormEstimate image;       // truncation M
  NormEstimate image_2m;    // truncation 2M
  double ratio = 0.0;
  double ratio_2m = 0.0;
  double truncation_discrepancy = 0.0;  // |ratio - ratio_2m|
  double ratio_error = 0.0;  // quadrature and truncation error bar on ratio
  bool conclusive = false;   // ratio + ratio_error < 1
};

/// ||E_* q~|| / ||q~||. Throws InvalidArgument for the zero differential and
/// Quadrature when either norm misses fail_rel_tol.
ContractionReport contraction_ratio(const QuadraticDifferential& q, const FamilySpec& spec,
                                    const FamilyParams& params, int truncation = 64,
                                    const QuadSettings& settings = {});

}  // namespace psf
