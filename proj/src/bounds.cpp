#include "isoradial/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "isoradial/errors.hpp"
#include "util.hpp"

namespace isoradial {

using util::KahanSum;
using util::kNegInf;
using util::least_squares;
using util::LineFit;
using util::Rng;

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274;

void check_vertex(const IsoradialGraph& g, int u, const char* who) {
  if (u < 0 || u >= g.n())
    throw Error(ErrorCode::invalid_argument,
                std::string(who) + ": vertex id out of range");
}

// Jump-rate range over directed interior half-edges. Interior vertices have a
// full dual cell, so every mu there is positive.
struct MuRange {
  double lo = 0.0;
  double hi = 0.0;
};

MuRange mu_range(const IsoradialGraph& g, const WeightSet& w) {
  MuRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (int u = 0; u < g.n(); ++u) {
    if (!g.is_interior(u)) continue;
    for (int k = g.neighbor_off[u]; k < g.neighbor_off[u + 1]; ++k) {
      r.lo = std::min(r.lo, w.mu[k]);
      r.hi = std::max(r.hi, w.mu[k]);
    }
  }
  if (!(r.hi > 0.0))
    throw Error(ErrorCode::invalid_argument,
                "rate bounds need at least one interior vertex");
  return r;
}

int max_interior_degree(const IsoradialGraph& g) {
  int m = 0;
  for (int u = 0; u < g.n(); ++u)
    if (g.is_interior(u)) m = std::max(m, g.degree(u));
  return m;
}

}  // namespace

PathProductBound metzger_bounds(const IsoradialGraph& g, const WeightSet& w,
                                int x, int y, double t, int n_max) {
  check_vertex(g, x, "metzger_bounds");
  check_vertex(g, y, "metzger_bounds");
  if (x == y)
    throw Error(ErrorCode::invalid_argument,
                "metzger_bounds: the path-product form needs distinct endpoints");
  if (!(t >= 0.0))
    throw Error(ErrorCode::invalid_argument, "metzger_bounds: t must be >= 0");

  const int dc = combinatorial_distance(g, x, y);
  const MuRange mu = mu_range(g, w);
  const int deg = max_interior_degree(g);
  double lambda_max = 0.0;
  for (int u = 0; u < g.n(); ++u)
    if (g.is_interior(u)) lambda_max = std::max(lambda_max, w.lambda[u]);

  // lambda_max >= mu_max / 2, so this default always certifies the cutoff.
  if (n_max <= 0)
    n_max = dc + 4 * static_cast<int>(std::ceil(lambda_max * t)) + 20;
  if (n_max < dc)
    throw Error(ErrorCode::invalid_argument,
                "metzger_bounds: n_max is below the combinatorial distance");

  PathProductBound out;
  out.n_max = n_max;
  // Past the cutoff each extra step multiplies the lower envelope by at most
  // t mu_max / (n + 1) < 1, so the envelope maximum cannot lie beyond it.
  out.cutoff_certified = t * mu.hi < static_cast<double>(n_max) + 1.0;

  if (t == 0.0) {
    out.log_lower = kNegInf;
    out.log_upper = kNegInf;
    return out;
  }

  // Max-plus profiles L_n(v) = best sum of log mu over length-n paths from x
  // staying on interior vertices. Chains started at an interior vertex can
  // only traverse interior vertices before arriving (absorbing rows have no
  // exits; closed chains have no others), so this path set is the walk's.
  const int n_vertices = g.n();
  std::vector<double> log_mu(w.mu.size(), kNegInf);
  int n_interior = 0;
  for (int u = 0; u < n_vertices; ++u) {
    if (!g.is_interior(u)) continue;
    ++n_interior;
    for (int k = g.neighbor_off[u]; k < g.neighbor_off[u + 1]; ++k)
      if (g.is_interior(g.neighbor_ids[k])) log_mu[k] = std::log(w.mu[k]);
  }

  const double log_mu_max = std::log(mu.hi);
  const int simple_cap = std::max(n_interior - 1, dc);

  std::vector<double> cur(n_vertices, kNegInf), nxt(n_vertices, kNegInf);
  cur[x] = 0.0;

  double best_lower = kNegInf;   // max_n of n log(t/n) + L_n(y)
  double best_factor = kNegInf;  // max_n of L_n(y) - n log mu_max, over all n
  int n_lower = 0, n_upper = 0;
  bool factor_exact = false;

  for (int n = 1; n <= n_max || (!factor_exact && n <= simple_cap); ++n) {
    std::fill(nxt.begin(), nxt.end(), kNegInf);
    double level_max = kNegInf;
    for (int u = 0; u < n_vertices; ++u) {
      if (cur[u] == kNegInf) continue;
      for (int k = g.neighbor_off[u]; k < g.neighbor_off[u + 1]; ++k) {
        if (log_mu[k] == kNegInf) continue;
        const int v = g.neighbor_ids[k];
        const double cand = cur[u] + log_mu[k];
        if (cand > nxt[v]) nxt[v] = cand;
        if (cand > level_max) level_max = cand;
      }
    }
    cur.swap(nxt);
    if (level_max == kNegInf) break;  // nothing reachable any more

    const double ly = cur[y];
    if (ly != kNegInf) {
      if (n >= dc && n <= n_max) {
        const double cand = static_cast<double>(n) *
                                std::log(t / static_cast<double>(n)) + ly;
        if (cand > best_lower) {
          best_lower = cand;
          n_lower = n;
        }
      }
      const double factor = ly - static_cast<double>(n) * log_mu_max;
      if (factor > best_factor) {
        best_factor = factor;
        n_upper = n;
      }
    }
    // Every continuation multiplies a path product by a factor <= mu_max, so
    // once no live prefix can beat the best factor found, it is the true sup
    // over paths of every length (cycle removal only raises the product).
    if (best_factor != kNegInf &&
        level_max - static_cast<double>(n) * log_mu_max <= best_factor)
      factor_exact = true;
    if (n >= simple_cap) factor_exact = true;
  }

  out.n_lower = n_lower;
  out.n_upper = n_upper;

  const double z = mu.hi * static_cast<double>(deg) * t;
  out.log_lower = best_lower == kNegInf
                      ? kNegInf
                      : -z - kLogSqrt2Pi + best_lower;
  // An unreachable target through interior vertices leaves the path factor at
  // its universal cap 1 (every factor mu / mu_max is <= 1).
  const double factor = best_factor == kNegInf ? 0.0 : std::min(best_factor, 0.0);
  out.log_upper = z + 1.0 + factor +
                  static_cast<double>(dc) *
                      (1.0 + std::log(z) - std::log(static_cast<double>(dc)));
  return out;
}

double improved_lower_bound(const IsoradialGraph& g, const WeightSet& w,
                            int x, int y, double t, double h, double beta) {
  check_vertex(g, x, "improved_lower_bound");
  check_vertex(g, y, "improved_lower_bound");
  if (x == y)
    throw Error(ErrorCode::invalid_argument,
                "improved_lower_bound: needs distinct endpoints");
  if (!(t > 0.0) || !(h > 0.0))
    throw Error(ErrorCode::invalid_argument,
                "improved_lower_bound: t and h must be positive");

  const double s = std::pow(h, beta) * t;  // walk time
  const MuRange mu = mu_range(g, w);
  const int deg = max_interior_degree(g);
  const int dc = combinatorial_distance(g, x, y);

  if (!(static_cast<double>(dc) > mu.lo * s))
    throw Error(ErrorCode::invalid_argument,
                "improved_lower_bound: requires d^c > mu_min * h^beta * t; "
                "outside that range the single-length simplification is invalid");

  return -mu.hi * static_cast<double>(deg) * s - kLogSqrt2Pi +
         static_cast<double>(dc) *
             (std::log(mu.lo * s) - std::log(static_cast<double>(dc)));
}

double volume(const IsoradialGraph& g, const WeightSet& w, int u, int n) {
  check_vertex(g, u, "volume");
  if (n < 0) throw Error(ErrorCode::invalid_argument, "volume: n must be >= 0");
  KahanSum s;
  for (int v : combinatorial_ball(g, u, n)) s.add(w.vertex_mass[v]);
  return s.value();
}

GrowthFit volume_growth_fit(const IsoradialGraph& g, const WeightSet& w,
                            int u, int n_min, int n_max) {
  check_vertex(g, u, "volume_growth_fit");
  if (n_min < 1 || n_max < n_min)
    throw Error(ErrorCode::invalid_argument,
                "volume_growth_fit: need 1 <= n_min <= n_max");

  // One BFS; shell sums give every vol(u, n) along the way.
  std::vector<int> dist(g.n(), -1);
  std::vector<int> queue;
  queue.reserve(64);
  queue.push_back(u);
  dist[u] = 0;
  std::vector<KahanSum> shell(static_cast<std::size_t>(n_max) + 1);
  if (!g.is_interior(u))
    throw Error(ErrorCode::boundary, "volume_growth_fit: ball clipped by the window");
  shell[0].add(w.vertex_mass[u]);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    if (dist[v] == n_max) continue;
    for (int nb : g.neighbors(v)) {
      if (dist[nb] >= 0) continue;
      dist[nb] = dist[v] + 1;
      if (!g.is_interior(nb))
        throw Error(ErrorCode::boundary,
                    "volume_growth_fit: ball clipped by the window at radius " +
                        std::to_string(dist[nb]));
      shell[dist[nb]].add(w.vertex_mass[nb]);
      queue.push_back(nb);
    }
  }

  std::vector<double> xs, ys;
  double vol = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    vol += shell[n].value();
    if (n >= n_min) {
      xs.push_back(std::log(static_cast<double>(n)));
      ys.push_back(std::log(vol));
    }
  }
  const LineFit f = least_squares(xs, ys);
  return GrowthFit{f.slope, f.intercept, f.max_residual};
}

namespace {

// Largest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
double tridiag_max_eigenvalue(const std::vector<double>& alpha,
                              const std::vector<double>& beta) {
  const int m = static_cast<int>(alpha.size());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < m; ++i) {
    const double r = (i > 0 ? std::abs(beta[i - 1]) : 0.0) +
                     (i + 1 < m ? std::abs(beta[i]) : 0.0);
    lo = std::min(lo, alpha[i] - r);
    hi = std::max(hi, alpha[i] + r);
  }
  auto count_below = [&](double x) {
    int cnt = 0;
    double d = 1.0;
    for (int i = 0; i < m; ++i) {
      const double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
      d = alpha[i] - x - b2 / d;
      if (d == 0.0) d = -1e-300;
      if (d < 0.0) ++cnt;
    }
    return cnt;
  };
  const double scale = std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  while (hi - lo > 1e-15 * scale) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= m)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double poincare_constant(const IsoradialGraph& g, const WeightSet& w,
                         int u0, int n) {
  check_vertex(g, u0, "poincare_constant");
  if (n < 1)
    throw Error(ErrorCode::invalid_argument, "poincare_constant: n must be >= 1");

  const std::vector<int> inner = combinatorial_ball(g, u0, n);
  const std::vector<int> outer = combinatorial_ball(g, u0, 2 * n);
  const int N = static_cast<int>(outer.size());

  std::vector<int> local(g.n(), -1);
  for (int i = 0; i < N; ++i) local[outer[i]] = i;

  // Dirichlet form on the ball-induced subgraph, local CSR. The quadratic
  // form doubles each undirected edge (ordered-pair sum convention).
  std::vector<int> eoff(N + 1, 0), ecol;
  std::vector<double> eomega;
  for (int i = 0; i < N; ++i) {
    const int v = outer[i];
    const auto nbrs = g.neighbors(v);
    const auto eids = g.incident_edges(v);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const int j = local[nbrs[k]];
      if (j < 0) continue;
      ecol.push_back(j);
      eomega.push_back(w.omega[eids[k]]);
    }
    eoff[i + 1] = static_cast<int>(ecol.size());
  }

  std::vector<char> in_inner(N, 0);
  KahanSum vol_sum;
  for (int v : inner) {
    in_inner[local[v]] = 1;
    vol_sum.add(w.vertex_mass[v]);
  }
  const double vol = vol_sum.value();

  std::vector<double> mass(N, 0.0);
  for (int i = 0; i < N; ++i) mass[i] = w.vertex_mass[outer[i]];

  auto apply_mass_form = [&](const std::vector<double>& f, std::vector<double>& out) {
    KahanSum mean;
    for (int i = 0; i < N; ++i)
      if (in_inner[i]) mean.add(mass[i] * f[i]);
    const double fbar = mean.value() / vol;
    for (int i = 0; i < N; ++i)
      out[i] = in_inner[i] ? mass[i] * (f[i] - fbar) : 0.0;
  };
  auto apply_dirichlet = [&](const std::vector<double>& f, std::vector<double>& out) {
    for (int i = 0; i < N; ++i) {
      KahanSum s;
      for (int k = eoff[i]; k < eoff[i + 1]; ++k)
        s.add(eomega[k] * (f[i] - f[ecol[k]]));
      out[i] = 2.0 * s.value();
    }
  };
  auto center = [&](std::vector<double>& f) {
    double s = 0.0;
    for (double v : f) s += v;
    s /= static_cast<double>(N);
    for (double& v : f) v -= s;
  };
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    KahanSum s;
    for (int i = 0; i < N; ++i) s.add(a[i] * b[i]);
    return s.value();
  };

  std::vector<double> jacobi(N, 0.0);
  for (int i = 0; i < N; ++i) {
    double d = 0.0;
    for (int k = eoff[i]; k < eoff[i + 1]; ++k) d += eomega[k];
    jacobi[i] = 2.0 * d;
    if (!(jacobi[i] > 0.0))
      throw Error(ErrorCode::internal, "poincare_constant: isolated ball vertex");
  }

  // CG for the (consistent, mean-zero) Dirichlet system. The kernel is the
  // constant vector; centering keeps rounding from drifting into it.
  auto solve_dirichlet = [&](std::vector<double> b) {
    center(b);
    std::vector<double> z(N, 0.0), r = b, y(N), p(N), ap(N);
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) return z;
    auto precond = [&](const std::vector<double>& in, std::vector<double>& out) {
      for (int i = 0; i < N; ++i) out[i] = in[i] / jacobi[i];
      center(out);
    };
    precond(r, y);
    p = y;
    double rz = dot(r, y);
    const int max_iter = 40 * N + 100;
    for (int it = 0; it < max_iter; ++it) {
      apply_dirichlet(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) break;
      const double a = rz / pap;
      for (int i = 0; i < N; ++i) {
        z[i] += a * p[i];
        r[i] -= a * ap[i];
      }
      center(r);
      if (std::sqrt(dot(r, r)) <= 1e-14 * bnorm) break;
      precond(r, y);
      const double rz2 = dot(r, y);
      const double beta = rz2 / rz;
      rz = rz2;
      for (int i = 0; i < N; ++i) p[i] = y[i] + beta * p[i];
    }
    center(z);
    return z;
  };

  // Lanczos for the top generalized eigenvalue of (mass form, Dirichlet form),
  // run in the Dirichlet inner product with full reorthogonalization.
  const int max_steps = std::min(N - 1, 160);
  std::vector<std::vector<double>> V, EV;
  std::vector<double> alpha, beta;

  Rng rng(0x9e3779b97f4a7c15ULL, 17);
  std::vector<double> v(N);
  for (int i = 0; i < N; ++i) v[i] = rng.uniform() - 0.5;
  center(v);
  {
    std::vector<double> ev(N);
    apply_dirichlet(v, ev);
    const double nrm = std::sqrt(dot(v, ev));
    if (!(nrm > 0.0))
      throw Error(ErrorCode::internal, "poincare_constant: degenerate start vector");
    for (int i = 0; i < N; ++i) {
      v[i] /= nrm;
      ev[i] /= nrm;
    }
    V.push_back(v);
    EV.push_back(ev);
  }

  double lam_prev = 0.0;
  double lam = 0.0;
  std::vector<double> mv(N);
  for (int j = 0; j < max_steps; ++j) {
    apply_mass_form(V[j], mv);
    const double aj = dot(mv, V[j]);
    alpha.push_back(aj);
    std::vector<double> wv = solve_dirichlet(mv);
    for (int i = 0; i < N; ++i) {
      wv[i] -= aj * V[j][i];
      if (j > 0) wv[i] -= beta[j - 1] * V[j - 1][i];
    }
    for (std::size_t i = 0; i < V.size(); ++i) {
      const double c = dot(wv, EV[i]);
      for (int q = 0; q < N; ++q) wv[q] -= c * V[i][q];
    }
    lam = tridiag_max_eigenvalue(alpha, beta);
    if (j > 2 && std::abs(lam - lam_prev) <= 1e-13 * std::max(1.0, std::abs(lam)))
      break;
    lam_prev = lam;

    std::vector<double> ew(N);
    apply_dirichlet(wv, ew);
    const double b2 = dot(wv, ew);
    if (!(b2 > 1e-28)) break;  // invariant subspace exhausted
    const double bj = std::sqrt(b2);
    beta.push_back(bj);
    for (int i = 0; i < N; ++i) {
      wv[i] /= bj;
      ew[i] /= bj;
    }
    V.push_back(std::move(wv));
    EV.push_back(std::move(ew));
  }

  return lam / (static_cast<double>(n) * static_cast<double>(n));
}

GaussianFit gaussian_lower_fit(const SparseGenerator& q, const IsoradialGraph& g,
                               const WeightSet& w,
                               const std::vector<VertexPair>& pairs,
                               const std::vector<double>& times) {
  if (q.variant != GeneratorVariant::constant_speed)
    throw Error(ErrorCode::invalid_argument,
                "gaussian_lower_fit: expects the constant-speed generator");

  // g_i(C) = log p - log m_v + log vol + C d^2/t must stay >= log c for every
  // retained sample; increasing C can only help, so feasibility is monotone.
  struct Sample {
    double base = 0.0;      // log p - log m_v + log vol
    double d2_over_t = 0.0;
  };
  std::vector<Sample> samples;
  for (const VertexPair& pr : pairs) {
    check_vertex(g, pr.u, "gaussian_lower_fit");
    check_vertex(g, pr.v, "gaussian_lower_fit");
    const int dc = pr.u == pr.v ? 0 : combinatorial_distance(g, pr.u, pr.v);
    for (double t : times) {
      if (!(t > 0.0) || t < static_cast<double>(dc)) continue;
      const LogEntry e = kernel_log_entry(q, pr.u, pr.v, t, 1e-8);
      const int radius = static_cast<int>(std::floor(std::sqrt(t)));
      const double vol = volume(g, w, pr.u, radius);
      Sample s;
      const double log_p_low =
          e.below_floor ? kNegInf
                        : e.log_value + std::log1p(-std::min(e.rel_error_bound, 0.5));
      s.base = log_p_low - std::log(w.vertex_mass[pr.v]) + std::log(vol);
      s.d2_over_t = static_cast<double>(dc) * static_cast<double>(dc) / t;
      samples.push_back(s);
    }
  }

  GaussianFit fit;
  fit.samples_used = static_cast<int>(samples.size());
  if (samples.empty()) return fit;

  std::vector<double> c_grid;  // 1-2-5 ladder across [1e-6, 1]
  for (double dec = 1e-6; dec < 1.5; dec *= 10.0)
    for (double m : {1.0, 2.0, 5.0})
      if (dec * m <= 1.0 + 1e-12) c_grid.push_back(dec * m);
  const double log_c_min = std::log(c_grid.front());

  for (double C = 0.25; C <= 10.0 + 1e-12; C += 0.25) {
    double slack = std::numeric_limits<double>::infinity();
    for (const Sample& s : samples)
      slack = std::min(slack, s.base + C * s.d2_over_t);
    if (slack < log_c_min) continue;  // infeasible even at the smallest c
    double best_c = c_grid.front();
    for (double c : c_grid)
      if (std::log(c) <= slack) best_c = c;
    fit.C_lower = C;
    fit.c_lower = best_c;
    fit.worst_slack = slack - std::log(best_c);
    fit.holds = true;
    return fit;
  }
  return fit;  // holds == false: no grid point works
}

}  // namespace isoradial
