#include "psf/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "psf/error.hpp"
#include "psf/verify.hpp"

namespace psf {

namespace {

// Odometer step, last range fastest. False once every combination is done.
bool advance(std::vector<int>& idx, const std::vector<BranchRange>& ranges) {
  for (std::size_t i = ranges.size(); i-- > 0;) {
    if (++idx[i] <= ranges[i].hi) return true;
    idx[i] = ranges[i].lo;
  }
  return false;
}

}  // namespace

std::vector<OrbitPortrait> expand_sweep(const OrbitPortrait& templ, const SweepSpec& spec) {
  long rows = 1;
  for (const BranchRange& r : spec.branches) {
    if (r.index < 0 || r.index >= static_cast<int>(templ.orbit.branch.size())) {
      fail(ErrorCode::InvalidArgument, "branch index " + std::to_string(r.index) + " out of range");
    }
    rows *= std::max(0, r.hi - r.lo + 1);
    if (rows > kMaxSweepRows) fail(ErrorCode::InvalidArgument, "sweep exceeds 10000 rows");
  }
  if (spec.eta) rows *= std::max(0, spec.eta->second - spec.eta->first + 1);
  if (rows > kMaxSweepRows) fail(ErrorCode::InvalidArgument, "sweep exceeds 10000 rows");

  const bool tied = templ.family.kind != FamilyKind::PExp;
  const int k1 = templ.k1(), k2 = templ.k2();
  const bool sizes_ok = templ.orbit.branch.size() == static_cast<std::size_t>(templ.orbit.size());

  std::vector<OrbitPortrait> out;
  out.reserve(static_cast<std::size_t>(rows));
  std::vector<int> etas;
  if (spec.eta) {
    for (int e = spec.eta->first; e <= spec.eta->second; ++e) etas.push_back(e);
  } else {
    etas.push_back(templ.eta);
  }
  for (int eta : etas) {
    std::vector<int> idx(spec.branches.size());
    for (std::size_t i = 0; i < spec.branches.size(); ++i) idx[i] = spec.branches[i].lo;
    if (std::any_of(spec.branches.begin(), spec.branches.end(),
                    [](const BranchRange& r) { return r.hi < r.lo; })) {
      continue;
    }
    do {
      OrbitPortrait p = templ;
      for (std::size_t i = 0; i < spec.branches.size(); ++i) {
        p.orbit.branch[static_cast<std::size_t>(spec.branches[i].index)] = idx[i];
      }
      if (tied && sizes_ok) {
        if (spec.eta) {
          p.eta = eta;
          p.orbit.branch[static_cast<std::size_t>(k2)] = p.orbit.branch[static_cast<std::size_t>(k1)] + eta;
        } else {
          p.eta = p.orbit.branch[static_cast<std::size_t>(k2)] - p.orbit.branch[static_cast<std::size_t>(k1)];
        }
      } else {
        p.eta = eta;
      }
      out.push_back(std::move(p));
    } while (advance(idx, spec.branches));
  }
  return out;
}

std::vector<SweepRow> run_sweep(const OrbitPortrait& templ, const SweepSpec& spec,
                                const IterationSettings& settings) {
  settings.validate();
  if (spec.jobs < 1) fail(ErrorCode::InvalidArgument, "jobs must be at least 1");
  const std::vector<OrbitPortrait> ports = expand_sweep(templ, spec);
  std::vector<SweepRow> rows(ports.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < ports.size(); i = next++) {
      SweepRow& row = rows[i];
      row.portrait = ports[i];
      row.violations = validate_portrait(row.portrait);
      if (!row.violations.empty()) continue;
      row.result = iterate(row.portrait, settings);
      if (!spec.cross_check || !row.result.params) continue;
      try {
        const OracleResult o = oracle_solve(row.portrait);
        row.oracle_ok = true;
        row.oracle_distance = parameter_distance(row.portrait.family, o.params, *row.result.params);
      } catch (const Error&) {
        row.oracle_ok = false;
      }
    }
  };
  const int n = std::min<int>(spec.jobs, static_cast<int>(std::max<std::size_t>(ports.size(), 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  return rows;
}

}  // namespace psf
