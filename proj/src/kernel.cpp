#include "isoradial/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isoradial/errors.hpp"
#include "util.hpp"

namespace isoradial {

double KernelRow::value(int i) const {
  return scaled_value[i] * std::exp(log_scale);
}

double KernelRow::mass() const {
  util::KahanSum s;
  for (double v : scaled_value) s.add(v);
  return s.value() * std::exp(log_scale);
}

int KernelRow::find(int v) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == v) return static_cast<int>(i);
  return -1;
}

namespace {

// Combinatorial ball around the source, discovered level by level over the
// generator's row sparsity, with the uniformization matrix P = I + Q/lambda
// re-indexed to ball-local ids as levels complete. One step of P moves mass
// one level outward at most, which is what makes the truncation certificate
// exact. Touching an inactive row means the window cannot certify the
// computation, so discovery throws window_too_small.
class BallWorkspace {
public:
  BallWorkspace(const SparseGenerator& q, int source) : q_(q) {
    if (source < 0 || source >= q.n)
      throw Error(ErrorCode::invalid_argument, "source vertex out of range");
    if (!q.active[source])
      throw Error(ErrorCode::boundary, "source vertex is not an active row");
    local_of_.assign(q.n, -1);
    verts_.push_back(source);
    local_of_[source] = 0;
    prefix_.push_back(1);  // prefix_[r] = vertices within depth <= r
    prow_off_.push_back(0);
  }

  // vertices within depth <= r (requires discovery has reached r)
  int prefix(int r) const { return prefix_[std::min<std::size_t>(r, prefix_.size() - 1)]; }
  int size() const { return static_cast<int>(verts_.size()); }
  int vertex(int i) const { return verts_[i]; }
  int find_local(int v) const { return local_of_[v]; }
  bool exhausted() const { return exhausted_; }

  // Makes step k runnable: x supported on depth <= k scatters into depth
  // <= k+1 through rows of depth <= k.
  void ensure_step(int k) {
    while (!exhausted_ && static_cast<int>(prefix_.size()) - 1 < k + 1)
      discover_next_level();
    while (rows_depth_ <= k) build_next_rows();
  }

  // y = x P restricted to rows of depth <= k. y must be zeroed by caller,
  // sized to prefix(k+1).
  void scatter(int k, const std::vector<double>& x, std::vector<double>& y) const {
    int rows = std::min(prefix(k), rows_built_);
    for (int i = 0; i < rows; ++i) {
      double xi = x[i];
      if (xi == 0.0) continue;
      y[i] += xi * pdiag_[i];
      for (int e = prow_off_[i]; e < prow_off_[i + 1]; ++e)
        y[pcol_[e]] += xi * pval_[e];
    }
  }

private:
  void discover_next_level() {
    int depth = static_cast<int>(prefix_.size()) - 1;
    int lo = depth == 0 ? 0 : prefix_[depth - 1];
    int hi = prefix_[depth];
    for (int i = lo; i < hi; ++i) {
      int z = verts_[i];
      for (int e = q_.row_off[z]; e < q_.row_off[z + 1]; ++e) {
        int c = q_.col[e];
        if (local_of_[c] >= 0) continue;
        if (!q_.active[c]) {
          std::ostringstream msg;
          msg << "window too small: the truncation ball reached an inactive "
                 "row at combinatorial radius "
              << depth + 1 << " from vertex " << verts_[0]
              << "; a certified evaluation needs the full ball interior";
          throw Error(ErrorCode::window_too_small, msg.str());
        }
        local_of_[c] = static_cast<int>(verts_.size());
        verts_.push_back(c);
      }
    }
    if (static_cast<int>(verts_.size()) == prefix_[depth]) exhausted_ = true;
    prefix_.push_back(static_cast<int>(verts_.size()));
  }

  void build_next_rows() {
    // rows for depth d need columns of depth d+1 discovered
    int d = rows_depth_;
    while (!exhausted_ && static_cast<int>(prefix_.size()) - 1 < d + 1)
      discover_next_level();
    int lo = d == 0 ? 0 : prefix(d - 1);
    int hi = prefix(d);
    for (int i = lo; i < hi; ++i) {
      int z = verts_[i];
      pdiag_.push_back(1.0 + q_.diag[z] / q_.lambda_max);
      for (int e = q_.row_off[z]; e < q_.row_off[z + 1]; ++e) {
        pcol_.push_back(local_of_[q_.col[e]]);
        pval_.push_back(q_.val[e] / q_.lambda_max);
      }
      prow_off_.push_back(static_cast<int>(pcol_.size()));
    }
    rows_built_ = hi;
    ++rows_depth_;
  }

  const SparseGenerator& q_;
  std::vector<int> verts_;
  std::vector<int> local_of_;
  std::vector<int> prefix_;
  bool exhausted_ = false;

  std::vector<int> prow_off_{};
  std::vector<int> pcol_;
  std::vector<double> pval_, pdiag_;
  int rows_built_ = 0;
  int rows_depth_ = 0;
};

// One uniformization step: scatter, then renormalize so max = 1, folding the
// factor into lsx. Returns false (and leaves x alone) if the step produced
// an identically zero vector, which only happens for an empty chain.
bool advance(const BallWorkspace& ball, int k, std::vector<double>& x,
             std::vector<double>& y, double& lsx) {
  int n_next = ball.prefix(k + 1);
  x.resize(n_next, 0.0);
  y.assign(n_next, 0.0);
  ball.scatter(k, x, y);
  double mx = 0.0;
  for (double v : y) mx = std::max(mx, v);
  if (mx == 0.0) return false;
  double inv = 1.0 / mx;
  for (double& v : y) v *= inv;
  x.swap(y);
  lsx += std::log(mx);
  return true;
}

} // namespace

KernelRow kernel_row(const SparseGenerator& q, int u, double t, double tol) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw Error(ErrorCode::invalid_argument, "time must be finite and nonnegative");
  if (!(tol > 0.0))
    throw Error(ErrorCode::invalid_argument, "tolerance must be positive");

  BallWorkspace ball(q, u);
  double lambda = q.lambda_max * t;
  std::int64_t K = util::poisson_truncation(lambda, tol / 2.0);

  std::vector<double> x{1.0}, y;
  double lsx = 0.0;

  std::vector<double> acc{0.0};
  double acc_scale = util::kNegInf;

  for (std::int64_t k = 0; k <= K; ++k) {
    ball.ensure_step(static_cast<int>(k));
    double s_k = util::log_poisson_pmf(k, lambda) + lsx;
    acc.resize(x.size(), 0.0);
    if (s_k > acc_scale) {
      double shrink = std::exp(acc_scale - s_k);  // 0 on the first pass
      for (double& v : acc) v *= shrink;
      acc_scale = s_k;
    }
    double f = std::exp(s_k - acc_scale);
    if (f > 0.0) {
      int lim = ball.prefix(static_cast<int>(k));
      for (int i = 0; i < lim; ++i) acc[i] += f * x[i];
    }
    if (k < K && !advance(ball, static_cast<int>(k), x, y, lsx)) break;
  }

  KernelRow row;
  row.source = u;
  row.t = t;
  row.steps_used = static_cast<int>(K);
  row.leaked_mass_bound =
      lambda == 0.0 ? 0.0 : std::exp(util::log_poisson_tail_bound(K, lambda));

  double vmax = 0.0;
  for (double v : acc) vmax = std::max(vmax, v);
  if (vmax == 0.0 || acc_scale == util::kNegInf)
    throw Error(ErrorCode::internal, "kernel row accumulated no mass");
  row.log_scale = acc_scale + std::log(vmax);
  row.vertices.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) row.vertices[i] = ball.vertex(static_cast<int>(i));
  row.scaled_value.resize(acc.size());
  double inv = 1.0 / vmax;
  for (std::size_t i = 0; i < acc.size(); ++i) row.scaled_value[i] = acc[i] * inv;

  // accumulated rounding can push the total a few ulps past 1; pull it back
  // so the mass-conservation sandwich holds as stated
  double mass = row.mass();
  if (mass > 1.0) {
    double fix = 1.0 / mass;
    for (double& v : row.scaled_value) v *= fix;
  }
  return row;
}

LogEntry kernel_log_entry(const SparseGenerator& q, int u, int v, double t,
                          double rel_tol) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw Error(ErrorCode::invalid_argument, "time must be finite and nonnegative");
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw Error(ErrorCode::invalid_argument, "relative tolerance must be in (0, 1)");
  if (v < 0 || v >= q.n)
    throw Error(ErrorCode::invalid_argument, "target vertex out of range");

  LogEntry out;
  if (t == 0.0) {
    out.log_value = (u == v) ? 0.0 : util::kNegInf;
    out.below_floor = (u != v);
    return out;
  }

  BallWorkspace ball(q, u);
  double lambda = q.lambda_max * t;
  double log_rel = std::log(rel_tol);

  std::vector<double> x{1.0}, y;
  double lsx = 0.0;
  double S = util::kNegInf;  // log of the partial sum

  for (std::int64_t k = 0;; ++k) {
    ball.ensure_step(static_cast<int>(k));
    int lv = ball.find_local(v);
    if (lv >= 0 && lv < static_cast<int>(x.size()) && x[lv] > 0.0)
      S = util::logsumexp(S, util::log_poisson_pmf(k, lambda) + lsx + std::log(x[lv]));

    double log_tail = util::log_poisson_tail_bound(k, lambda);
    if (S != util::kNegInf && log_tail <= log_rel + S) {
      out.steps_used = static_cast<int>(k);
      out.rel_error_bound = std::exp(log_tail - S);
      out.log_value = S;
      return out;
    }
    if (S == util::kNegInf && ball.exhausted() && ball.find_local(v) < 0) {
      // v is outside the active component: the entry is exactly zero
      out.steps_used = static_cast<int>(k);
      out.log_value = util::kNegInf;
      out.below_floor = true;
      return out;
    }
    if (!advance(ball, static_cast<int>(k), x, y, lsx)) {
      out.steps_used = static_cast<int>(k);
      out.log_value = S;
      out.below_floor = (S == util::kNegInf);
      out.rel_error_bound = S == util::kNegInf ? 1.0 : std::exp(log_tail - S);
      return out;
    }
  }
}

KernelMoments kernel_moments(const SparseGenerator& q, const IsoradialGraph& g,
                             int u, double t, double tol) {
  if (!(tol > 0.0))
    throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  if (q.n != g.n())
    throw Error(ErrorCode::invalid_argument, "generator does not match graph");

  double lambda = q.lambda_max * t;
  double hmax = g.h;  // one step moves at most one edge, |e| <= h

  // push K until the mass tail and every moment-weighted tail are certified
  std::int64_t K = util::poisson_truncation(lambda, tol / 2.0);
  auto moment_tail = [&](std::int64_t KK, int p) {
    double lb = util::log_poisson_moment_tail_bound(KK, lambda, p);
    if (lb > 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(hmax, p) * std::exp(lb);
  };
  while (moment_tail(K, 1) > tol / 2.0 || moment_tail(K, 2) > tol / 2.0 ||
         moment_tail(K, 4) > tol / 2.0)
    ++K;

  BallWorkspace ball(q, u);
  std::vector<double> x{1.0}, y;
  double lsx = 0.0;

  // per-vertex displacement factors, extended as the ball grows
  std::vector<double> dx, dy;
  Point pu = g.position[u];
  auto extend = [&](std::size_t sz) {
    for (std::size_t i = dx.size(); i < sz; ++i) {
      Point d = g.position[ball.vertex(static_cast<int>(i))] - pu;
      dx.push_back(d.x);
      dy.push_back(d.y);
    }
  };

  util::KahanSum mass, mean_x, mean_y, sec_re, sec_im, cross, f_re, f_im;
  for (std::int64_t k = 0; k <= K; ++k) {
    ball.ensure_step(static_cast<int>(k));
    extend(x.size());
    double wk = std::exp(util::log_poisson_pmf(k, lambda) + lsx);
    if (wk > 0.0) {
      int lim = ball.prefix(static_cast<int>(k));
      util::KahanSum m0, mx, my, sr, si, cr, fr, fi;
      for (int i = 0; i < lim; ++i) {
        double p = x[i];
        if (p == 0.0) continue;
        m0.add(p);
        mx.add(p * dx[i]);
        my.add(p * dy[i]);
        sr.add(p * dx[i] * dx[i]);
        si.add(p * dy[i] * dy[i]);
        cr.add(p * dx[i] * dy[i]);
        fr.add(p * dx[i] * dx[i] * dx[i] * dx[i]);
        fi.add(p * dy[i] * dy[i] * dy[i] * dy[i]);
      }
      mass.add(wk * m0.value());
      mean_x.add(wk * mx.value());
      mean_y.add(wk * my.value());
      sec_re.add(wk * sr.value());
      sec_im.add(wk * si.value());
      cross.add(wk * cr.value());
      f_re.add(wk * fr.value());
      f_im.add(wk * fi.value());
    }
    if (k < K && !advance(ball, static_cast<int>(k), x, y, lsx)) break;
  }

  KernelMoments mom;
  mom.mass = mass.value();
  mom.mean = {mean_x.value(), mean_y.value()};
  mom.second_re = sec_re.value();
  mom.second_im = sec_im.value();
  mom.cross = cross.value();
  mom.fourth_re = f_re.value();
  mom.fourth_im = f_im.value();
  double mass_tail =
      lambda == 0.0 ? 0.0 : std::exp(util::log_poisson_tail_bound(K, lambda));
  mom.truncation_error = std::max(
      {mass_tail, moment_tail(K, 1), moment_tail(K, 2), moment_tail(K, 4)});
  return mom;
}

double kernel_event_probability(const SparseGenerator& q, const IsoradialGraph& g,
                                int u, double t,
                                const std::function<bool(Point)>& region,
                                double tol, double* err) {
  if (!(tol > 0.0))
    throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  if (q.n != g.n())
    throw Error(ErrorCode::invalid_argument, "generator does not match graph");

  double lambda = q.lambda_max * t;
  std::int64_t K = util::poisson_truncation(lambda, tol);

  BallWorkspace ball(q, u);
  std::vector<double> x{1.0}, y;
  double lsx = 0.0;

  std::vector<char> inside;
  auto extend = [&](std::size_t sz) {
    for (std::size_t i = inside.size(); i < sz; ++i)
      inside.push_back(region(g.position[ball.vertex(static_cast<int>(i))]) ? 1 : 0);
  };

  util::KahanSum prob;
  for (std::int64_t k = 0; k <= K; ++k) {
    ball.ensure_step(static_cast<int>(k));
    extend(x.size());
    double wk = std::exp(util::log_poisson_pmf(k, lambda) + lsx);
    if (wk > 0.0) {
      int lim = ball.prefix(static_cast<int>(k));
      util::KahanSum hit;
      for (int i = 0; i < lim; ++i)
        if (inside[i] && x[i] != 0.0) hit.add(x[i]);
      prob.add(wk * hit.value());
    }
    if (k < K && !advance(ball, static_cast<int>(k), x, y, lsx)) break;
  }

  double tail = lambda == 0.0 ? 0.0 : std::exp(util::log_poisson_tail_bound(K, lambda));
  if (err) *err = tail;
  return std::min(prob.value(), 1.0);
}

} // namespace isoradial
