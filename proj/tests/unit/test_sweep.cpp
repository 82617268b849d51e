#include <doctest.h>

#include <cmath>

#include "psf/error.hpp"
#include "psf/sweep.hpp"

using namespace psf;

namespace {

OrbitPortrait exp_template(int k1, int l, std::vector<int> branch) {
  OrbitPortrait p;
  p.family = FamilySpec::exponential();
  p.orbit = OrbitBlock{k1, l, std::move(branch), canonical_successor(k1, l)};
  p.eta = p.orbit.branch[static_cast<std::size_t>(k1 + l)] - p.orbit.branch[static_cast<std::size_t>(k1)];
  return p;
}

}  // namespace

TEST_CASE("eta sweep over fixed portraits") {
  SweepSpec spec;
  spec.eta = std::pair{1, 3};
  const auto rows = run_sweep(exp_template(0, 1, {0, 1}), spec, {});
  REQUIRE(rows.size() == 3);
  for (int i = 0; i < 3; ++i) {
    const SweepRow& r = rows[static_cast<std::size_t>(i)];
    CHECK(r.portrait.eta == i + 1);
    CHECK(r.portrait.orbit.branch == std::vector<int>{0, i + 1});
    REQUIRE(r.result.status == IterationStatus::Converged);
    CHECK(std::abs(r.result.params->lambda - cplx(0, kTwoPi * (i + 1))) < 1e-12);
  }
}

TEST_CASE("sweep expansion order and limits") {
  const OrbitPortrait t = exp_template(1, 2, {0, 0, 0, 1});
  SweepSpec spec;
  spec.branches = {{1, -1, 0}, {2, 0, 2}};
  const auto ports = expand_sweep(t, spec);
  REQUIRE(ports.size() == 6);
  CHECK(ports[0].orbit.branch == std::vector<int>{0, -1, 0, 1});
  CHECK(ports[1].orbit.branch == std::vector<int>{0, -1, 1, 1});
  CHECK(ports[3].orbit.branch == std::vector<int>{0, 0, 0, 1});
  for (const auto& p : ports) CHECK(p.eta == p.orbit.branch[3] - p.orbit.branch[1]);

  SweepSpec empty;
  empty.branches = {{1, 2, 1}};
  CHECK(expand_sweep(t, empty).empty());
  CHECK(run_sweep(t, empty, {}).empty());

  SweepSpec huge;
  huge.branches = {{1, 0, 200}, {2, 0, 200}};
  CHECK_THROWS_AS(expand_sweep(t, huge), Error);
  SweepSpec bad_index;
  bad_index.branches = {{9, 0, 1}};
  CHECK_THROWS_AS(expand_sweep(t, bad_index), Error);
  SweepSpec no_jobs;
  no_jobs.jobs = 0;
  CHECK_THROWS_AS(run_sweep(t, no_jobs, {}), Error);
}

TEST_CASE("invalid rows are reported, not run") {
  SweepSpec spec;
  spec.branches = {{2, 0, 1}};
  const auto rows = run_sweep(exp_template(1, 1, {0, 0, 1}), spec, {});
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].violations.empty());  // eta 0
  CHECK(rows[1].violations.empty());
  CHECK(rows[1].result.status == IterationStatus::Converged);
}

TEST_CASE("parallel sweeps are deterministic") {
  const OrbitPortrait t = exp_template(1, 1, {0, 0, 1});
  SweepSpec spec;
  spec.branches = {{1, -1, 1}, {2, 1, 2}};
  const auto serial = run_sweep(t, spec, {});
  spec.jobs = 4;
  const auto parallel = run_sweep(t, spec, {});
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].portrait.orbit.branch == parallel[i].portrait.orbit.branch);
    CHECK(serial[i].result.status == parallel[i].result.status);
    CHECK(serial[i].result.trace.steps.size() == parallel[i].result.trace.steps.size());
    if (serial[i].result.params) CHECK(*serial[i].result.params == *parallel[i].result.params);
  }
}
