#include <doctest.h>

#include <cmath>

#include "psf/error.hpp"
#include "psf/pullback.hpp"
#include "psf/sweep.hpp"
#include "psf/verify.hpp"

using namespace psf;

namespace {

OrbitPortrait exp_portrait(int k1, int l, std::vector<int> branch) {
  OrbitPortrait p;
  p.family = FamilySpec::exponential();
  p.orbit = OrbitBlock{k1, l, std::move(branch), canonical_successor(k1, l)};
  p.eta = p.orbit.branch[static_cast<std::size_t>(k1 + l)] - p.orbit.branch[static_cast<std::size_t>(k1)];
  return p;
}

OrbitPortrait pexp_fixed(int p) {
  OrbitPortrait port;
  port.family = FamilySpec::polynomial_exponential(p);
  port.orbit = OrbitBlock{0, 1, {0, 0}, canonical_successor(0, 1)};
  port.critical_case = CriticalCase::PeriodicC;
  return port;
}

OrbitPortrait pexp_preperiodic() {
  OrbitPortrait port;
  port.family = FamilySpec::polynomial_exponential(1);
  port.orbit = OrbitBlock{1, 1, {0, 0, 1}, canonical_successor(1, 1)};
  port.critical_case = CriticalCase::NonperiodicCAndFc;
  port.eta = 1;
  port.lambda_seed = cplx(-1, -2);
  return port;
}

OrbitPortrait av2_preperiodic() {
  OrbitPortrait port = exp_portrait(1, 1, {0, 0, 1});
  port.family = FamilySpec::two_asymptotic_values();
  port.second_orbit = OrbitBlock{0, 1, {1, -1}, canonical_successor(0, 1)};
  return port;
}

}  // namespace

TEST_CASE("orbit_verify on exact parameters") {
  for (int eta = 1; eta <= 3; ++eta) {
    const VerificationReport r = orbit_verify(FamilySpec::exponential(),
                                              FamilyParams::exponential(cplx(0, kTwoPi * eta)),
                                              exp_portrait(0, 1, {0, eta}), 1e-9);
    CHECK(r.pass);
    CHECK(r.residual < 1e-12);
    REQUIRE(r.orbit.size() == 3);
  }
  for (int p = 1; p <= 3; ++p) {
    const VerificationReport r = orbit_verify(FamilySpec::polynomial_exponential(p),
                                              FamilyParams::exponential(-double(p)), pexp_fixed(p), 1e-9);
    CHECK(r.pass);
  }
}

TEST_CASE("orbit_verify rejects perturbed parameters") {
  const VerificationReport r = orbit_verify(FamilySpec::exponential(),
                                            FamilyParams::exponential(cplx(0.1, kTwoPi)),
                                            exp_portrait(0, 1, {0, 1}), 1e-9);
  CHECK_FALSE(r.pass);
  CHECK(r.residual > 1e-3);
}

TEST_CASE("orbit_verify flags escaping orbits") {
  // 0 -> 1 -> e^40: leaves every bounded region
  const VerificationReport r = orbit_verify(FamilySpec::exponential(), FamilyParams::exponential(40.0),
                                            exp_portrait(1, 2, {0, 0, 0, 1}), 1e-9);
  CHECK_FALSE(r.pass);
  CHECK(r.diverged);
}

TEST_CASE("iterated parameters verify") {
  for (const OrbitPortrait& p : {exp_portrait(1, 1, {0, 0, 1}), pexp_preperiodic(), av2_preperiodic()}) {
    const IterationResult r = iterate(p);
    REQUIRE(r.status == IterationStatus::Converged);
    const VerificationReport v = orbit_verify(p.family, *r.params, p, 1e-9);
    CHECK(v.pass);
    if (p.second_orbit) CHECK(v.second_orbit.size() == 3);
  }
}

TEST_CASE("oracle agrees with the iteration for exponential portraits") {
  const OrbitPortrait p = exp_portrait(1, 1, {0, 0, 1});
  const IterationResult r = iterate(p);
  REQUIRE(r.params);
  const OracleResult o = oracle_solve(p);
  CHECK(o.residual < 1e-12);
  CHECK(o.matching_starts >= 1);
  CHECK(parameter_distance(p.family, o.params, *r.params) < 1e-8);
  CHECK(std::abs(o.params.lambda - cplx(1.4612043209104928, 0.8445316070032681)) < 1e-8);
  CHECK(orbit_verify(p.family, o.params, p, 1e-9).pass);
}

TEST_CASE("oracle on fixed portraits") {
  for (int eta = 1; eta <= 3; ++eta) {
    const OracleResult o = oracle_solve(exp_portrait(0, 1, {0, eta}));
    CHECK(std::abs(o.params.lambda - cplx(0, kTwoPi * eta)) < 1e-10);
  }
  const OracleResult o = oracle_solve(pexp_fixed(2));
  CHECK(std::abs(o.params.lambda + 2.0) < 1e-6);
}

TEST_CASE("oracle on a preperiodic pexp portrait") {
  const OrbitPortrait p = pexp_preperiodic();
  const OracleResult o = oracle_solve(p);
  const IterationResult r = iterate(p);
  REQUIRE(r.params);
  CHECK(parameter_distance(p.family, o.params, *r.params) < 1e-8);
}

TEST_CASE("oracle input limits") {
  CHECK_THROWS_AS(oracle_solve(exp_portrait(3, 5, {0, 0, 0, 0, 0, 0, 0, 0, 1})), Error);
}

TEST_CASE("sweep over the second sheet cross-checked with the oracle") {
  const OrbitPortrait templ = exp_portrait(1, 1, {0, 0, 1});
  SweepSpec spec;
  spec.branches = {{2, -2, 2}};
  spec.cross_check = true;
  const auto rows = run_sweep(templ, spec, {});
  REQUIRE(rows.size() == 5);
  for (const SweepRow& row : rows) {
    const int m2 = row.portrait.orbit.branch[2];
    CAPTURE(m2);
    if (m2 == 0) {
      CHECK_FALSE(row.violations.empty());
      continue;
    }
    REQUIRE(row.violations.empty());
    REQUIRE(row.result.status == IterationStatus::Converged);
    REQUIRE(row.oracle_ok);
    CHECK(row.oracle_distance < 1e-8);
    CHECK(row.portrait.eta == m2);
  }
}

TEST_CASE("parameter distance") {
  const FamilySpec av2 = FamilySpec::two_asymptotic_values();
  // alpha and -alpha give the same map
  CHECK(parameter_distance(av2, FamilyParams::av2(cplx(1, 2), 3.0), FamilyParams::av2(cplx(-1, -2), 3.0)) < 1e-15);
  CHECK(parameter_distance(FamilySpec::exponential(), FamilyParams::exponential(1.0),
                           FamilyParams::exponential(1.0)) == 0.0);
}
