#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "psf/error.hpp"
#include "psf/qd_transfer.hpp"

using namespace psf;

namespace {

const QuadraticDifferential kQ012{{0.0, 1.0, 2.0}, {1.0, -2.0, 1.0}};  // 2/(z^3 - z) shifted to 0,1,2

// Push-forward under e^{lambda w} of sum a_j/(w - p_j), summed over all sheets:
// sum_m 1/(x + 2 pi i m / lambda) = (lambda/2) coth(lambda x / 2).
cplx exp_push_closed_form(const QuadraticDifferential& q, cplx lambda, cplx z) {
  const cplx w0 = std::log(z) / lambda;
  cplx s = 0.0;
  for (std::size_t j = 0; j < q.poles.size(); ++j) {
    const cplx x = lambda * (w0 - q.poles[j]) / 2.0;
    s += q.coeffs[j] * (lambda / 2.0) * std::cosh(x) / std::sinh(x);
  }
  return s / ((lambda * z) * (lambda * z));
}

}  // namespace

TEST_CASE("differential validation") {
  CHECK(QuadraticDifferential{}.is_zero());
  CHECK_NOTHROW(kQ012.validate());
  CHECK_THROWS_AS((QuadraticDifferential{{0.0, 1.0}, {1.0}}).validate(), Error);
  CHECK_THROWS_AS((QuadraticDifferential{{0.0, 1.0, 2.0}, {1.0, -1.0, 1.0}}).validate(), Error);
  CHECK_THROWS_AS((QuadraticDifferential{{0.0, 0.0, 2.0}, {1.0, -2.0, 1.0}}).validate(), Error);
  CHECK(kQ012.decay_ratio() == doctest::Approx(1.0).epsilon(1e-2));
  const QuadraticDifferential sum = kQ012.plus(kQ012.scaled(-1.0));
  for (cplx w : {cplx(0.3, 0.4), cplx(-2, 5)}) CHECK(std::abs(sum(w)) < 1e-15);
}

TEST_CASE("canonical basis and contraction points") {
  const std::vector<cplx> pts{0.0, 1.0, cplx(2, 1), cplx(-1, 3)};
  const auto basis = canonical_basis(pts);
  REQUIRE(basis.size() == 2);
  for (const QuadraticDifferential& q : basis) CHECK_NOTHROW(q.validate());
  CHECK(canonical_basis({0.0, 1.0}).empty());
  const auto aug = contraction_points({0.0, 1.0});
  REQUIRE(aug.size() == 3);
  CHECK(aug[2] == cplx(2.0, 0.0));
  CHECK(contraction_points(pts).size() == pts.size());
}

TEST_CASE("qd_norm against an independent quadrature value") {
  CHECK(qd_norm(QuadraticDifferential{}).value == 0.0);
  // same differential as 2/(z^3 - z) after the shift z -> z - 1
  const NormEstimate n = qd_norm(kQ012);
  CHECK(n.value == doctest::Approx(27.50074327351636).epsilon(1e-3));
  CHECK(n.error < 1e-4 * n.value);
  const NormEstimate n3 = qd_norm(kQ012.scaled(cplx(0, 3)));
  CHECK(std::abs(n3.value - 3.0 * n.value) < 1e-10 * n.value);
}

TEST_CASE("wright omega matches reference values") {
  std::ifstream in(PSF_EXAMPLES_DIR "/wright_omega.txt");
  REQUIRE(in);
  int rows = 0;
  double yr, yi, wr, wi;
  while (in >> yr >> yi >> wr >> wi) {
    const cplx w = wright_omega({yr, yi});
    CAPTURE(yr);
    CAPTURE(yi);
    CHECK(std::abs(w - cplx(wr, wi)) <= 1e-10 * std::max(1.0, std::abs(cplx(wr, wi))));
    ++rows;
  }
  CHECK(rows >= 10);
}

TEST_CASE("push-forward examples") {
  const FamilySpec e = FamilySpec::exponential();
  CHECK(push_forward_at(QuadraticDifferential{}, e, FamilyParams::exponential(1.0), cplx(std::exp(1.0)), 64) ==
        cplx(0.0, 0.0));

  const FamilyParams lam1 = FamilyParams::exponential(1.0);
  const cplx z = std::exp(1.0);
  const QuadraticDifferential q023{{0.0, 2.0, 3.0}, {1.0, -3.0, 2.0}};
  const cplx a = push_forward_at(q023, e, lam1, z, 64);
  const cplx b = push_forward_at(q023, e, lam1, z, 128);
  CHECK(std::isfinite(std::abs(a)));
  CHECK(std::abs(a - b) < 1e-6);
  const PushForwardValue pv = push_forward_with_tail(q023, e, lam1, z, 64);
  CHECK(std::abs(pv.value - a) < 1e-15);
  CHECK(std::abs(pv.tail - (a - b)) < 1e-12);

  for (cplx lam : {cplx(1.0, 0.0), cplx(0.3, 2.0), cplx(-1.2, 0.5)}) {
    for (cplx zz : {cplx(0.5, 0.7), cplx(-3, 1), cplx(2, -2)}) {
      const cplx exact = exp_push_closed_form(kQ012, lam, zz);
      const cplx got = push_forward_at(kQ012, e, FamilyParams::exponential(lam), zz, 512);
      CAPTURE(lam);
      CAPTURE(zz);
      CHECK(std::abs(got - exact) < 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }

  // linearity
  const QuadraticDifferential q2{{0.0, 1.0, cplx(0.5, 1.0)}, {cplx(0.5, 1.0) - 1.0, -cplx(0.5, 1.0), 1.0}};
  REQUIRE_NOTHROW(q2.validate());
  const cplx c(0.7, -1.3);
  const FamilySpec pe = FamilySpec::polynomial_exponential(2);
  const FamilyParams pp = FamilyParams::exponential(cplx(-2.0, 0.3));
  for (auto [spec, params] : {std::pair{e, lam1}, std::pair{pe, pp}}) {
    const cplx lhs = push_forward_at(kQ012.plus(q2.scaled(c)), spec, params, cplx(0.4, 0.9), 32);
    const cplx rhs = push_forward_at(kQ012, spec, params, cplx(0.4, 0.9), 32) +
                     c * push_forward_at(q2, spec, params, cplx(0.4, 0.9), 32);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("preimages map back to their point") {
  const FamilySpec pe = FamilySpec::polynomial_exponential(2);
  const FamilyParams pp = FamilyParams::exponential(cplx(-2.0, 0.3));
  const cplx zeta(0.2, 0.4);
  const auto pre = preimages(pe, pp, zeta, 4);
  CHECK(pre.size() == 2 * 9);
  for (const Preimage& p : pre) {
    CHECK(spherical_distance(evaluate(pe, pp, p.w), std::exp(zeta)) < 1e-10);
  }
}

TEST_CASE("contraction ratio") {
  const FamilySpec e = FamilySpec::exponential();
  CHECK_THROWS_AS(contraction_ratio(QuadraticDifferential{}, e, FamilyParams::exponential(1.0)), Error);

  const FamilyParams p2pi = FamilyParams::exponential(cplx(0, kTwoPi));
  const ContractionReport r = contraction_ratio(kQ012, e, p2pi);
  CHECK(r.ratio < 1.0);
  CHECK(r.conclusive);

  const FamilyParams generic = FamilyParams::exponential(cplx(0.8, 1.1));
  const ContractionReport g1 = contraction_ratio(kQ012, e, generic);
  const ContractionReport g2 = contraction_ratio(kQ012.scaled(cplx(-2, 1)), e, generic);
  CHECK(g1.ratio < 1.0);
  CHECK(std::abs(g1.ratio - g2.ratio) < 1e-8);
  CHECK(g1.ratio_error >= g1.truncation_discrepancy);
}
