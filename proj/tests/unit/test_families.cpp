#include <doctest.h>

#include <cmath>
#include <random>

#include "psf/error.hpp"
#include "psf/families.hpp"
#include "support/oracles.hpp"

using namespace psf;

namespace {

const FamilySpec kExp = FamilySpec::exponential();
const FamilySpec kAv2 = FamilySpec::two_asymptotic_values();
FamilySpec pexp(int p) { return FamilySpec::polynomial_exponential(p); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

cplx random_point(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> r(lo, hi), t(0.0, kTwoPi);
  return std::polar(r(rng), t(rng));
}

}  // namespace

TEST_CASE("family spec validation") {
  CHECK_NOTHROW(kExp.validate());
  CHECK_NOTHROW(pexp(3).validate());
  CHECK_THROWS_AS(pexp(0).validate(), Error);
  CHECK_THROWS_AS((FamilySpec{FamilyKind::Exp, 2}).validate(), Error);
  CHECK_THROWS_AS(validate_params(kExp, FamilyParams::exponential(0.0)), Error);
  CHECK_THROWS_AS(validate_params(kAv2, FamilyParams::av2(1.0, 1.0)), Error);
  CHECK_THROWS_AS(validate_params(kAv2, FamilyParams::av2(-1.0, 1.0)), Error);
  CHECK_THROWS_AS(validate_params(kAv2, FamilyParams::av2(2.0, 0.0)), Error);
}

TEST_CASE("evaluate examples") {
  CHECK(rel(evaluate(pexp(1), FamilyParams::exponential(-1.0), 1.0).value(), 1.0) < 1e-15);
  CHECK(rel(evaluate(kExp, FamilyParams::exponential(cplx(0, kTwoPi)), 1.0).value(), 1.0) < 1e-15);
  CHECK(rel(evaluate(kAv2, FamilyParams::av2(std::sqrt(2.0), cplx(0.3, 2)), 0.0).value(), 1.0) < 1e-15);
  CHECK_THROWS_AS(evaluate(kExp, FamilyParams::exponential(1.0), cplx(INFINITY, 0)), Error);
}

TEST_CASE("pexp multiplier") {
  // alpha = (-lambda/p)^p e^p; both forms agree and the critical value is 1
  for (int p = 1; p <= 4; ++p) {
    const cplx lam(-0.7, 1.9);
    const cplx direct = std::pow(-lam / double(p), p) * std::exp(double(p));
    CHECK(rel(pexp_alpha(p, lam), direct) < 1e-13);
    CHECK(rel(evaluate(pexp(p), FamilyParams::exponential(lam), -double(p) / lam).value(), 1.0) < 1e-12);
  }
}

TEST_CASE("av2 overflow returns the asymptotic limit") {
  const FamilyParams pr = FamilyParams::av2(std::sqrt(2.0), 1.0);
  const ExtendedComplex v = evaluate(kAv2, pr, 1000.0);
  CHECK(spherical_distance(v, 2.0) < 1e-15);
  CHECK(spherical_distance(evaluate(kAv2, pr, -1000.0), 0.0) < 1e-15);
  CHECK(spherical_distance(av2_second_asymptotic_value(std::sqrt(2.0)), 2.0) < 1e-15);
}

TEST_CASE("normalization identities on random parameters") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 1000; ++i) {
    const cplx lam = random_point(rng, 0.2, 8.0);
    REQUIRE(rel(evaluate(kExp, FamilyParams::exponential(lam), 0.0).value(), 1.0) == 0.0);
    const int p = 1 + static_cast<int>(i % 4);
    REQUIRE(rel(evaluate(pexp(p), FamilyParams::exponential(lam), -double(p) / lam).value(), 1.0) < 1e-12);
    const cplx alpha = random_point(rng, 0.3, 3.0);
    if (std::abs(alpha * alpha - 1.0) < 1e-3) continue;
    const FamilyParams av = FamilyParams::av2(alpha, random_point(rng, 0.2, 5.0));
    REQUIRE(rel(evaluate(kAv2, av, 0.0).value(), 1.0) < 1e-12);
  }
}

TEST_CASE("derivative examples") {
  CHECK(rel(derivative(kExp, FamilyParams::exponential(1.0), 0.0), 1.0) < 1e-15);
  CHECK(std::abs(derivative(pexp(1), FamilyParams::exponential(-1.0), 1.0)) < 1e-15);
  const FamilyParams av = FamilyParams::av2(std::sqrt(2.0), 1.0);
  const double h = 1e-7;
  const cplx fd = (evaluate(kAv2, av, h).value() - evaluate(kAv2, av, -h).value()) / (2 * h);
  CHECK(rel(derivative(kAv2, av, 0.0), fd) < 1e-6);
}

TEST_CASE("derivative matches finite differences") {
  std::mt19937_64 rng(5);
  const double h = 1e-7;
  for (int i = 0; i < 1000; ++i) {
    const cplx lam = random_point(rng, 0.3, 3.0);
    const cplx z = random_point(rng, 0.1, 2.0);
    const int p = 1 + i % 3;
    const FamilyParams av = FamilyParams::av2(random_point(rng, 1.2, 2.0), lam);
    for (auto [spec, pr] : {std::pair{kExp, FamilyParams::exponential(lam)},
                            std::pair{pexp(p), FamilyParams::exponential(lam)}, std::pair{kAv2, av}}) {
      const ExtendedComplex a = evaluate(spec, pr, z + h), b = evaluate(spec, pr, z - h);
      if (a.is_infinite() || b.is_infinite()) continue;
      const cplx fd = (a.value() - b.value()) / (2 * h);
      const cplx d = derivative(spec, pr, z);
      if (std::abs(d) < 1e-3 || std::abs(d) > 1e4) continue;  // near a pole or critical point
      REQUIRE(std::abs(fd - d) < 1e-6 * std::abs(d));
    }
  }
}

TEST_CASE("singular points") {
  const SingularPoints sp = singular_points(pexp(1), FamilyParams::exponential(-1.0));
  REQUIRE(sp.critical_points.size() == 1);
  CHECK(rel(sp.critical_points[0], 1.0) < 1e-15);
  CHECK(spherical_distance(sp.critical_values[0], 1.0) < 1e-15);

  const SingularPoints sp3 = singular_points(pexp(3), FamilyParams::exponential(cplx(1, 1)));
  CHECK(sp3.critical_points.size() == 2);
  CHECK(sp3.critical_multiplicities.front() == 2);

  const SingularPoints av = singular_points(kAv2, FamilyParams::av2(std::sqrt(2.0), 1.0));
  REQUIRE(av.asymptotic_values.size() == 2);
  CHECK(spherical_distance(av.asymptotic_values[0], 0.0) < 1e-15);
  CHECK(spherical_distance(av.asymptotic_values[1], 2.0) < 1e-15);
  CHECK(av.critical_points.empty());

  const SingularPoints ex = singular_points(kExp, FamilyParams::exponential(1.0));
  CHECK(ex.critical_points.empty());
  REQUIRE(ex.asymptotic_values.size() == 2);
  CHECK(ex.asymptotic_values[1].is_infinite());
}

TEST_CASE("solve_parameter examples") {
  for (int eta = -2; eta <= 3; ++eta) {
    if (eta == 0) continue;
    CHECK(rel(solve_parameter(kExp, 1.0, eta).lambda, cplx(0, kTwoPi * eta)) < 1e-15);
  }
  // lambda = -1 is a double root of log(-lambda) + 1 + lambda, so a 1e-13
  // residual only pins lambda to about sqrt(1e-13).
  const FamilyParams pr = solve_parameter(pexp(1), 1.0, 0, std::nullopt, FamilyParams::exponential(-0.9));
  CHECK(rel(pr.lambda, -1.0) < 1e-6);
  CHECK(rel(evaluate(pexp(1), pr, -1.0 / pr.lambda).value(), 1.0) < 1e-12);

  const FamilyParams truth = FamilyParams::av2(std::sqrt(2.0), 1.0);
  const cplx target = evaluate(kAv2, truth, 1.0).value();
  const FamilyParams back = solve_parameter(kAv2, target, 0, cplx(2.0));
  CHECK(rel(back.alpha, truth.alpha) < 1e-12);
  CHECK(rel(back.beta, truth.beta) < 1e-12);

  CHECK_THROWS_AS(solve_parameter(kExp, 0.0, 0), Error);
  CHECK_THROWS_AS(solve_parameter(pexp(2), 1.0, 0), Error);
  CHECK_THROWS_AS(solve_parameter(kAv2, 2.0, 0, cplx(1.0)), Error);
}

TEST_CASE("av2 root continuity follows the seed") {
  const FamilyParams seed = FamilyParams::av2(-std::sqrt(2.0), 1.0);
  const FamilyParams pr = solve_parameter(kAv2, cplx(0.5, 0.5), 0, cplx(2.0), seed);
  CHECK(rel(pr.alpha, -std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("inverse_branch examples") {
  CHECK(rel(inverse_branch(kExp, FamilyParams::exponential(1.0), std::exp(1.0), 0, 5.0), 1.0) < 1e-15);
  CHECK(rel(inverse_branch(kExp, FamilyParams::exponential(cplx(0, kTwoPi)), 1.0, 1, 0.0), 1.0) < 1e-15);
  // 1 is the critical point: a double root again
  const cplx c = inverse_branch(pexp(1), FamilyParams::exponential(-1.0), 1.0, 0, 0.9);
  CHECK(rel(c, 1.0) < 1e-6);
  CHECK(rel(evaluate(pexp(1), FamilyParams::exponential(-1.0), c).value(), 1.0) < 1e-12);
  CHECK_THROWS_AS(inverse_branch(kExp, FamilyParams::exponential(1.0), 0.0, 0, 1.0), Error);
  CHECK_THROWS_AS(inverse_branch(kAv2, FamilyParams::av2(std::sqrt(2.0), 1.0), 2.0, 0, 1.0), Error);
}

TEST_CASE("sheet index recovers the requested branch") {
  const FamilyParams ex = FamilyParams::exponential(cplx(1.2, 0.8));
  const FamilyParams av = FamilyParams::av2(cplx(1.3, -0.2), cplx(0.9, 1.7));
  for (int m = -3; m <= 3; ++m) {
    CHECK(sheet_index(kExp, ex, inverse_branch(kExp, ex, cplx(0.4, 2.0), m, 0.0)) == m);
    CHECK(sheet_index(kAv2, av, inverse_branch(kAv2, av, cplx(-0.4, 0.3), m, 0.0)) == m);
  }
}

TEST_CASE("inverse_branch of evaluate is the identity") {
  for (const FamilySpec& spec : {kExp, pexp(1), pexp(2), pexp(3), kAv2}) {
    const oracle::RoundTrip rt = oracle::round_trip(spec, 1000, 99);
    CAPTURE(to_string(spec.kind));
    CAPTURE(spec.p);
    CHECK(rt.failures == 0);
    for (std::size_t b = 0; b < 5; ++b) {
      CHECK(rt.samples[b] == 1000);
      CHECK(rt.worst[b] < 1e-10);
    }
  }
}

TEST_CASE("evaluate of inverse_branch returns the target") {
  std::mt19937_64 rng(98);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const cplx lam = random_point(rng, 0.5, 3.0);
    const cplx w = std::polar(std::exp(u(rng)), u(rng) * M_PI);
    const FamilyParams ex = FamilyParams::exponential(lam);
    const FamilyParams av = FamilyParams::av2(random_point(rng, 1.2, 2.0), lam);
    for (int m = -2; m <= 2; ++m) {
      REQUIRE(rel(evaluate(kExp, ex, inverse_branch(kExp, ex, w, m, 0.0)).value(), w) < 1e-10);
      if (std::abs(w - av2_second_asymptotic_value(av.alpha)) > 1e-6) {
        REQUIRE(rel(evaluate(kAv2, av, inverse_branch(kAv2, av, w, m, 0.0)).value(), w) < 1e-10);
      }
    }
  }
}

TEST_CASE("av2 Schwarzian is -beta^2/2") {
  std::mt19937_64 rng(13);
  for (int s = 0; s < 10; ++s) {
    const FamilyParams pr = FamilyParams::av2(random_point(rng, 1.2, 2.5), random_point(rng, 0.5, 2.0));
    const cplx expect = -0.5 * pr.beta * pr.beta;
    // points where g stays moderate; the oracle's step adapts to the distance to a pole
    for (int taken = 0; taken < 20;) {
      const cplx z = random_point(rng, 0.0, 1.0);
      const ExtendedComplex g = evaluate(kAv2, pr, z);
      if (g.is_infinite() || std::abs(g.value()) > 5.0) continue;
      ++taken;
      const cplx S = oracle::schwarzian(kAv2, pr, z);
      REQUIRE(std::abs(S - expect) < 1e-4 * std::abs(expect));
    }
  }
}

TEST_CASE("av2 omits its asymptotic values") {
  std::mt19937_64 rng(17);
  const FamilyParams pr = FamilyParams::av2(cplx(1.4, 0.3), cplx(0.8, -1.1));
  const cplx lam = av2_second_asymptotic_value(pr.alpha);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 10000; ++i) {
    const ExtendedComplex v = evaluate(kAv2, pr, cplx(u(rng), u(rng)));
    if (v.is_infinite()) continue;
    REQUIRE(v.value() != cplx(0.0));
    REQUIRE(v.value() != lam);
  }
}
