#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace psf::quad {

/// Axis-aligned cell [s0, s1] x [t0, t1]. `corner` marks a vertex carrying an
/// integrable 1/r singularity: 0 = (s0,t0), 1 = (s1,t0), 2 = (s0,t1),
/// 3 = (s1,t1), -1 = none. Such cells are integrated after a Duffy map.
struct Cell {
  double s0, s1, t0, t1;
  int corner = -1;
};

struct Singularity {
  double s, t;
};

/// Tensor grid over [s0,s1] x [t0,t1] whose lines pass through every
/// singularity, plus extra uniform lines at spacing <= ds, dt. Cells
/// touching a singularity get the matching corner flag.
std::vector<Cell> singular_grid(double s0, double s1, double t0, double t1,
                                const std::vector<Singularity>& sing, double ds, double dt);

struct Settings {
  double abs_tol = 0.0;
  double rel_tol = 1e-6;
  std::size_t max_evals = 20'000'000;
};

struct Result {
  std::vector<double> value;
  std::vector<double> error;
  std::size_t cells = 0;
  std::size_t evals = 0;
  bool converged = false;
};

/// f(s, t, out) writes `n_out` nonnegative values at one point.
using Integrand = std::function<void(double, double, double*)>;

/// Globally adaptive tensor Gauss-Kronrod 7/15 cubature. Cells with the
/// largest error are split in four until every component meets
/// max(abs_tol, rel_tol |value|) or the evaluation budget runs out.
Result integrate(const Integrand& f, std::size_t n_out, const std::vector<Cell>& cells,
                 const Settings& settings);

}  // namespace psf::quad
