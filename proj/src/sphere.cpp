#include "psf/sphere.hpp"

#include <cmath>
#include <limits>

#include "psf/error.hpp"

namespace psf {

ExtendedComplex::ExtendedComplex(cplx z) {
  if (std::isnan(z.real()) || std::isnan(z.imag())) {
    fail(ErrorCode::Domain, "NaN is not a point of the sphere");
  }
  if (std::isinf(z.real()) || std::isinf(z.imag())) {
    infinite_ = true;
    return;
  }
  z_ = z;
}

ExtendedComplex ExtendedComplex::infinity() noexcept {
  ExtendedComplex e;
  e.infinite_ = true;
  return e;
}

cplx ExtendedComplex::value() const {
  if (infinite_) fail(ErrorCode::Domain, "value() of the point at infinity");
  return z_;
}

ExtendedComplex ExtendedComplex::normalized() const noexcept {
  if (infinite_ || std::abs(z_) > kInfinityModulus) return infinity();
  return *this;
}

double spherical_distance(const ExtendedComplex& z, const ExtendedComplex& w) noexcept {
  const ExtendedComplex a = z.normalized();
  const ExtendedComplex b = w.normalized();
  if (a.is_infinite() && b.is_infinite()) return 0.0;
  if (a.is_infinite() || b.is_infinite()) {
    const double r = std::abs(a.is_infinite() ? b.value() : a.value());
    return 1.0 / std::hypot(1.0, r);
  }
  const cplx u = a.value();
  const cplx v = b.value();
  const double d = std::abs(u - v) / (std::hypot(1.0, std::abs(u)) * std::hypot(1.0, std::abs(v)));
  return std::min(d, 1.0);
}

double arg_0_2pi(cplx w) noexcept {
  double a = std::arg(w);
  if (a < 0.0) a += kTwoPi;
  // arg can round up to exactly 2pi for tiny negative imaginary parts.
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

cplx branch_log(cplx w, int m) {
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
    fail(ErrorCode::Domain, "branch_log of a non-finite value");
  }
  if (w == cplx(0.0, 0.0)) fail(ErrorCode::Domain, "branch_log(0)");
  return {std::log(std::abs(w)), arg_0_2pi(w) + kTwoPi * m};
}

cplx log_near(cplx w, cplx ref_log) {
  const cplx base = branch_log(w, 0);
  const double k = std::round((ref_log.imag() - base.imag()) / kTwoPi);
  return {base.real(), base.imag() + kTwoPi * k};
}

namespace {

void check_coefficient(cplx a) {
  if (a == cplx(0.0, 0.0) || !std::isfinite(a.real()) || !std::isfinite(a.imag())) {
    fail(ErrorCode::InvalidArgument, "Moebius coefficient must be finite and nonzero");
  }
}

}  // namespace

ExtendedComplex mobius_apply(cplx a, const ExtendedComplex& z) {
  check_coefficient(a);
  const cplx a2 = a * a;
  if (z.is_infinite()) {
    if (a2 == cplx(1.0, 0.0)) return ExtendedComplex::infinity();
    return a2 / (a2 - 1.0);
  }
  const cplx u = z.value();
  // a u / ((a - 1/a) u + 1/a) = a^2 u / ((a^2 - 1) u + 1)
  const cplx den = (a2 - 1.0) * u + 1.0;
  if (den == cplx(0.0, 0.0)) return ExtendedComplex::infinity();
  return ExtendedComplex(a2 * u / den).normalized();
}

ExtendedComplex mobius_invert(cplx a, const ExtendedComplex& w) {
  check_coefficient(a);
  const cplx a2 = a * a;
  if (w.is_infinite()) {
    if (a2 == cplx(1.0, 0.0)) return ExtendedComplex::infinity();
    return -1.0 / (a2 - 1.0);
  }
  const cplx v = w.value();
  const cplx den = a2 - (a2 - 1.0) * v;
  if (den == cplx(0.0, 0.0)) return ExtendedComplex::infinity();
  return ExtendedComplex(v / den).normalized();
}

cplx mobius_derivative(cplx a, cplx z) {
  check_coefficient(a);
  const cplx a2 = a * a;
  const cplx den = (a2 - 1.0) * z + 1.0;
  if (den == cplx(0.0, 0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
  return a2 / (den * den);
}

}  // namespace psf
