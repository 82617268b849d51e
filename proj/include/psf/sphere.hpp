#pragma once

#include <complex>
#include <numbers>

namespace psf {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Moduli above this are treated as the point at infinity in spherical
// computations.
inline constexpr double kInfinityModulus = 1e15;

/// A point of the Riemann sphere: a finite complex number or infinity.
///
/// Constructing from a value with an infinite component yields infinity;
/// NaN components are rejected with a Domain error.
class ExtendedComplex {
 public:
  ExtendedComplex() = default;
  ExtendedComplex(cplx z);  // NOLINT(google-explicit-constructor)
  ExtendedComplex(double x) : ExtendedComplex(cplx(x, 0.0)) {}  // NOLINT

  static ExtendedComplex infinity() noexcept;

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }

  /// The finite value. Throws Domain on infinity.
  cplx value() const;

  /// Infinity for moduli above kInfinityModulus, otherwise unchanged.
  ExtendedComplex normalized() const noexcept;

  friend bool operator==(const ExtendedComplex& a, const ExtendedComplex& b) noexcept {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.z_ == b.z_;
  }

 private:
  cplx z_{0.0, 0.0};
  bool infinite_ = false;
};

/// Chordal distance |z-w| / (sqrt(1+|z|^2) sqrt(1+|w|^2)), with
/// d(z, inf) = 1 / sqrt(1+|z|^2), its limit. Symmetric and bounded by 1.
double spherical_distance(const ExtendedComplex& z, const ExtendedComplex& w) noexcept;

/// Argument in [0, 2pi).
double arg_0_2pi(cplx w) noexcept;

/// log|w| + i arg(w) + 2 pi i m with arg(w) in [0, 2pi).
/// Throws Domain for w == 0 or non-finite w.
cplx branch_log(cplx w, int m);

/// Logarithm of w continued from the reference value `ref_log`, i.e. the
/// determination whose imaginary part lies within pi of Im(ref_log).
cplx log_near(cplx w, cplx ref_log);

/// M(z) = a z / ((a - 1/a) z + 1/a). Fixes 0 and 1, sends infinity to
/// a^2/(a^2-1). Throws InvalidArgument for a == 0 or non-finite a.
ExtendedComplex mobius_apply(cplx a, const ExtendedComplex& z);

/// Inverse of mobius_apply for the same coefficient.
ExtendedComplex mobius_invert(cplx a, const ExtendedComplex& w);

/// Derivative of mobius_apply at finite z (infinite at the pole).
cplx mobius_derivative(cplx a, cplx z);

}  // namespace psf
