#include "psf/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace psf::quad {

namespace {

// Kronrod 15-point abscissae (positive half, descending) and weights; the
// odd entries are the 7-point Gauss abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Rule {
  std::array<double, 15> x{};   // nodes on [0, 1]
  std::array<double, 15> wk{};  // Kronrod weights on [0, 1]
  std::array<double, 15> wg{};  // Gauss weights on [0, 1], zero off the Gauss nodes
};

Rule make_rule() {
  Rule r;
  for (int i = 0; i < 15; ++i) {
    const int k = i < 8 ? i : 14 - i;
    const double x = i < 8 ? -kXgk[k] : kXgk[k];
    r.x[i] = 0.5 * (x + 1.0);
    r.wk[i] = 0.5 * kWgk[k];
    r.wg[i] = (k % 2 == 1) ? 0.5 * kWg[k / 2] : 0.0;
  }
  return r;
}

const Rule& rule() {
  static const Rule r = make_rule();
  return r;
}

struct Estimate {
  std::vector<double> value;
  std::vector<double> error;
};

// Unit-square GK estimate of g(u, v) * jac(u, v), accumulated into est.
template <class Map>
void unit_square(const Integrand& f, std::size_t n_out, Map map, double scale, Estimate& est,
                 std::vector<double>& buf) {
  const Rule& R = rule();
  std::vector<double> k(n_out, 0.0), g(n_out, 0.0);
  for (int i = 0; i < 15; ++i) {
    for (int j = 0; j < 15; ++j) {
      double s, t, jac;
      map(R.x[i], R.x[j], s, t, jac);
      f(s, t, buf.data());
      const double wk = R.wk[i] * R.wk[j] * jac;
      const double wg = R.wg[i] * R.wg[j] * jac;
      for (std::size_t c = 0; c < n_out; ++c) {
        k[c] += wk * buf[c];
        g[c] += wg * buf[c];
      }
    }
  }
  for (std::size_t c = 0; c < n_out; ++c) {
    est.value[c] += scale * k[c];
    est.error[c] += scale * std::abs(k[c] - g[c]);
  }
}

Estimate estimate_cell(const Integrand& f, std::size_t n_out, const Cell& cell,
                       std::vector<double>& buf, std::size_t& evals) {
  Estimate est{std::vector<double>(n_out, 0.0), std::vector<double>(n_out, 0.0)};
  const double area = (cell.s1 - cell.s0) * (cell.t1 - cell.t0);
  if (cell.corner < 0) {
    unit_square(
        f, n_out,
        [&](double x, double y, double& s, double& t, double& jac) {
          s = cell.s0 + x * (cell.s1 - cell.s0);
          t = cell.t0 + y * (cell.t1 - cell.t0);
          jac = 1.0;
        },
        area, est, buf);
    evals += 225;
    return est;
  }
  // Duffy: put the singular vertex at the origin of the unit square and
  // split along the diagonal; each triangle's Jacobian u cancels 1/r.
  const bool right = cell.corner == 1 || cell.corner == 3;
  const bool top = cell.corner == 2 || cell.corner == 3;
  const double sc = right ? cell.s1 : cell.s0;
  const double sf = right ? cell.s0 : cell.s1;
  const double tc = top ? cell.t1 : cell.t0;
  const double tf = top ? cell.t0 : cell.t1;
  for (int tri = 0; tri < 2; ++tri) {
    unit_square(
        f, n_out,
        [&](double u, double v, double& s, double& t, double& jac) {
          const double x = tri == 0 ? u : u * v;
          const double y = tri == 0 ? u * v : u;
          s = sc + x * (sf - sc);
          t = tc + y * (tf - tc);
          jac = u;
        },
        area, est, buf);
  }
  evals += 450;
  return est;
}

std::array<Cell, 4> split(const Cell& c) {
  const double sm = 0.5 * (c.s0 + c.s1);
  const double tm = 0.5 * (c.t0 + c.t1);
  std::array<Cell, 4> out = {Cell{c.s0, sm, c.t0, tm, -1}, Cell{sm, c.s1, c.t0, tm, -1},
                             Cell{c.s0, sm, tm, c.t1, -1}, Cell{sm, c.s1, tm, c.t1, -1}};
  // Quadrant q touches the original vertex q.
  if (c.corner >= 0) out[static_cast<std::size_t>(c.corner)].corner = c.corner;
  return out;
}

std::vector<double> lines(double a, double b, std::vector<double> extra, double step) {
  extra.push_back(a);
  extra.push_back(b);
  std::vector<double> v;
  for (double x : extra) {
    if (x >= a && x <= b) v.push_back(x);
  }
  std::sort(v.begin(), v.end());
  std::vector<double> uniq;
  for (double x : v) {
    if (uniq.empty() || x - uniq.back() > 1e-12 * std::max(1.0, std::abs(x))) uniq.push_back(x);
  }
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
    const double len = uniq[i + 1] - uniq[i];
    const int n = step > 0.0 ? std::max(1, static_cast<int>(std::ceil(len / step))) : 1;
    for (int k = 0; k < n; ++k) out.push_back(uniq[i] + len * k / n);
  }
  out.push_back(uniq.back());
  return out;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

std::vector<Cell> singular_grid(double s0, double s1, double t0, double t1,
                                const std::vector<Singularity>& sing, double ds, double dt) {
  std::vector<double> es, et;
  for (const auto& p : sing) {
    es.push_back(p.s);
    et.push_back(p.t);
  }
  const std::vector<double> S = lines(s0, s1, es, ds);
  const std::vector<double> T = lines(t0, t1, et, dt);
  auto singular_at = [&](double s, double t) {
    return std::any_of(sing.begin(), sing.end(),
                       [&](const Singularity& p) { return near(p.s, s) && near(p.t, t); });
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i + 1 < S.size(); ++i) {
    for (std::size_t j = 0; j + 1 < T.size(); ++j) {
      Cell c{S[i], S[i + 1], T[j], T[j + 1], -1};
      const std::array<std::pair<double, double>, 4> v = {
          std::pair{c.s0, c.t0}, std::pair{c.s1, c.t0}, std::pair{c.s0, c.t1},
          std::pair{c.s1, c.t1}};
      for (int q = 0; q < 4; ++q) {
        if (singular_at(v[q].first, v[q].second)) {
          c.corner = q;
          break;
        }
      }
      cells.push_back(c);
    }
  }
  return cells;
}

Result integrate(const Integrand& f, std::size_t n_out, const std::vector<Cell>& initial,
                 const Settings& settings) {
  struct Node {
    Cell cell;
    Estimate est;
    bool live = true;
  };
  std::vector<Node> nodes;
  nodes.reserve(initial.size() * 4);
  std::vector<double> buf(n_out);
  Result res;
  res.value.assign(n_out, 0.0);
  res.error.assign(n_out, 0.0);

  for (const Cell& c : initial) {
    nodes.push_back({c, estimate_cell(f, n_out, c, buf, res.evals), true});
    for (std::size_t k = 0; k < n_out; ++k) {
      res.value[k] += nodes.back().est.value[k];
      res.error[k] += nodes.back().est.error[k];
    }
  }
  std::vector<double> scale(n_out);
  for (std::size_t k = 0; k < n_out; ++k) {
    scale[k] = std::max({settings.abs_tol, settings.rel_tol * std::abs(res.value[k]), 1e-300});
  }
  auto key = [&](const Estimate& e) {
    double s = 0.0;
    for (std::size_t k = 0; k < n_out; ++k) s += e.error[k] / scale[k];
    return s;
  };
  std::priority_queue<std::pair<double, std::size_t>> queue;
  for (std::size_t i = 0; i < nodes.size(); ++i) queue.emplace(key(nodes[i].est), i);

  auto done = [&] {
    for (std::size_t k = 0; k < n_out; ++k) {
      const double tol = std::max(settings.abs_tol, settings.rel_tol * std::abs(res.value[k]));
      if (res.error[k] > tol) return false;
    }
    return true;
  };

  while (!done() && res.evals < settings.max_evals && !queue.empty()) {
    const std::size_t i = queue.top().second;
    queue.pop();
    nodes[i].live = false;
    for (std::size_t k = 0; k < n_out; ++k) {
      res.value[k] -= nodes[i].est.value[k];
      res.error[k] -= nodes[i].est.error[k];
    }
    for (const Cell& child : split(nodes[i].cell)) {
      Estimate e = estimate_cell(f, n_out, child, buf, res.evals);
      for (std::size_t k = 0; k < n_out; ++k) {
        res.value[k] += e.value[k];
        res.error[k] += e.error[k];
      }
      const double kk = key(e);
      nodes.push_back({child, std::move(e), true});
      queue.emplace(kk, nodes.size() - 1);
    }
  }

  // Re-sum from scratch to shed the add/subtract drift.
  std::fill(res.value.begin(), res.value.end(), 0.0);
  std::fill(res.error.begin(), res.error.end(), 0.0);
  for (const Node& n : nodes) {
    if (!n.live) continue;
    ++res.cells;
    for (std::size_t k = 0; k < n_out; ++k) {
      res.value[k] += n.est.value[k];
      res.error[k] += n.est.error[k];
    }
  }
  res.converged = done();
  return res;
}

}  // namespace psf::quad
