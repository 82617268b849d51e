#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "psf/families.hpp"

namespace oracle {

using psf::cplx;

// S(g) = (g''/g')' - (g''/g')^2 / 2 with g' exact and g'', g''' from
// central differences of g'. The step is a fixed fraction of the local
// length scale: 1/|beta| and the distance to the nearest pole, ~|g|/|g'|.
inline cplx schwarzian(const psf::FamilySpec& spec, const psf::FamilyParams& params, cplx z) {
  const cplx d0 = psf::derivative(spec, params, z);
  double scale = std::abs(psf::evaluate(spec, params, z).value()) / std::abs(d0);
  if (spec.kind == psf::FamilyKind::AV2) scale = std::min(scale, 1.0 / std::abs(params.beta));
  const double h = 1e-4 * scale;
  const cplx dp = psf::derivative(spec, params, z + h);
  const cplx dm = psf::derivative(spec, params, z - h);
  const cplx d2 = (dp - dm) / (2 * h);
  const cplx d3 = (dp - 2.0 * d0 + dm) / (h * h);
  const cplx r = d2 / d0;
  return d3 / d0 - r * r - 0.5 * r * r;
}

// Winding number about 0 of the image of a polyline under the map, by
// accumulating the argument increments over a fine sampling.
inline double image_winding(const psf::FamilySpec& spec, const psf::FamilyParams& params,
                            const std::vector<cplx>& polyline, int samples_per_leg = 4000) {
  double total = 0.0;
  cplx prev = psf::evaluate(spec, params, polyline.front()).value();
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    for (int k = 1; k <= samples_per_leg; ++k) {
      const cplx z = polyline[i] + (polyline[i + 1] - polyline[i]) * (double(k) / samples_per_leg);
      const cplx w = psf::evaluate(spec, params, z).value();
      total += std::arg(w / prev);
      prev = w;
    }
  }
  return total / (2.0 * M_PI);
}

struct RoundTrip {
  std::array<int, 5> samples{};   // per branch m = -2..2
  std::array<double, 5> worst{};  // max relative error per branch
  int failures = 0;               // inverse_branch threw
};

// inverse_branch(evaluate(z), sheet_index(z), seed near z) against z, for
// random parameters and random z, until every branch in -2..2 has `per_branch`
// samples. The seed is z scaled radially so it shares z's log sheet. Points where the inverse is ill-conditioned (critical points,
// poles, overflow) are not drawn.
inline RoundTrip round_trip(const psf::FamilySpec& spec, int per_branch, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-4.0, 4.0), mod(0.5, 3.0), ang(0.0, 2 * M_PI);
  RoundTrip rt;
  for (long attempt = 0; attempt < 1000L * per_branch; ++attempt) {
    if (*std::min_element(rt.samples.begin(), rt.samples.end()) >= per_branch) break;
    const cplx lam = std::polar(mod(rng), ang(rng));
    psf::FamilyParams pr = psf::FamilyParams::exponential(lam);
    if (spec.kind == psf::FamilyKind::AV2) {
      const cplx alpha = std::polar(1.2 + 0.8 * mod(rng) / 3.0, ang(rng));
      pr = psf::FamilyParams::av2(alpha, lam);
    }
    const cplx z(box(rng), box(rng));
    const psf::ExtendedComplex e = psf::evaluate(spec, pr, z);
    if (e.is_infinite()) continue;
    const cplx w = e.value();
    if (std::abs(w) < 1e-8 || std::abs(w) > 1e8) continue;
    const cplx dlog = psf::derivative(spec, pr, z) / w;
    if (std::abs(dlog) * std::max(1.0, std::abs(z)) < 1e-2) continue;
    if (spec.kind == psf::FamilyKind::AV2 &&
        std::abs(w - psf::av2_second_asymptotic_value(pr.alpha)) < 1e-6) {
      continue;
    }
    const int m = psf::sheet_index(spec, pr, z);
    if (m < -2 || m > 2) continue;
    const std::size_t b = static_cast<std::size_t>(m + 2);
    if (rt.samples[b] >= per_branch) continue;
    ++rt.samples[b];
    try {
      const cplx back = psf::inverse_branch(spec, pr, w, m, z * 1.01);
      rt.worst[b] = std::max(rt.worst[b], std::abs(back - z) / std::max(1.0, std::abs(z)));
    } catch (const std::exception&) {
      ++rt.failures;
    }
  }
  return rt;
}

}  // namespace oracle
