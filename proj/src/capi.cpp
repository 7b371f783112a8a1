// C shim over the C++ core: opaque handles own their C++ objects, every
// entry point traps exceptions and converts them to status codes, and the
// failing message is parked in thread-local storage for isr_last_error().
#include "isoradial.h"

#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isoradial/bounds.hpp"
#include "isoradial/errors.hpp"
#include "isoradial/geometry.hpp"
#include "isoradial/io.hpp"
#include "isoradial/kernel.hpp"
#include "isoradial/operators.hpp"
#include "isoradial/regimes.hpp"
#include "isoradial/walk.hpp"

using namespace isoradial;

struct isr_graph {
  IsoradialGraph g;
  WeightSet w;
  std::optional<GeneratorSpec> spec;
  std::optional<io::StoredEdgeData> stored;
};

struct isr_generator {
  SparseGenerator q;
};

struct isr_kernel_row {
  KernelRow row;
};

struct isr_trajectory {
  WalkTrajectory traj;
};

struct isr_sweep {
  SweepResult result;
};

namespace {

thread_local std::string t_error;

isr_status map_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return ISR_ERR_INVALID_ARGUMENT;
    case ErrorCode::geometry: return ISR_ERR_GEOMETRY;
    case ErrorCode::window_too_small: return ISR_ERR_WINDOW_TOO_SMALL;
    case ErrorCode::disconnected: return ISR_ERR_DISCONNECTED;
    case ErrorCode::boundary: return ISR_ERR_BOUNDARY;
    case ErrorCode::io: return ISR_ERR_IO;
    case ErrorCode::config: return ISR_ERR_CONFIG;
    case ErrorCode::internal: return ISR_ERR_INTERNAL;
  }
  return ISR_ERR_UNKNOWN;
}

template <class F>
isr_status guarded(F&& f) noexcept {
  try {
    f();
    t_error.clear();
    return ISR_OK;
  } catch (const Error& e) {
    t_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    t_error = e.what();
    return ISR_ERR_UNKNOWN;
  } catch (...) {
    t_error = "unknown failure";
    return ISR_ERR_UNKNOWN;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

Family parse_family(const char* name) {
  require(name != nullptr, "family must not be NULL");
  const std::string s = name;
  if (s == "square") return Family::square;
  if (s == "triangular") return Family::triangular;
  if (s == "rhombic_tracks") return Family::rhombic_tracks;
  throw Error(ErrorCode::invalid_argument, "unknown family \"" + s + "\"");
}

const char* family_cstr(Family f) {
  switch (f) {
    case Family::square: return "square";
    case Family::triangular: return "triangular";
    case Family::rhombic_tracks: return "rhombic_tracks";
  }
  return "?";
}

void check_edge(const isr_graph* g, int e) {
  require(e >= 0 && e < g->g.m(), "edge id out of range");
}

void check_vertex(const isr_graph* g, int u) {
  require(u >= 0 && u < g->g.n(), "vertex id out of range");
}

SweepConfig convert_config(const isr_sweep_config* cfg) {
  require(cfg != nullptr, "config must not be NULL");
  require(cfg->h_count == 0 || cfg->h_values != nullptr,
          "h_values must not be NULL when h_count > 0");
  SweepConfig out;
  out.family = parse_family(cfg->family);
  out.square_spacing = cfg->square_spacing != 0;
  out.x = {cfg->x[0], cfg->x[1]};
  out.y = {cfg->y[0], cfg->y[1]};
  out.t = cfg->t;
  out.beta = cfg->beta;
  out.h_sequence.assign(cfg->h_values, cfg->h_values + cfg->h_count);
  out.tol = cfg->tol;
  out.gap_threshold = cfg->gap_threshold;
  out.threads = cfg->threads;
  out.extent_override = cfg->extent_override;
  return out;
}

}  // namespace

extern "C" {

const char* isr_version(void) { return "1.0.0"; }

const char* isr_last_error(void) { return t_error.c_str(); }

isr_status isr_graph_generate(const char* family, double h, int extent,
                              int spacing_convention, const double* col_angles,
                              int n_col, const double* row_angles, int n_row,
                              double track_margin, isr_graph** out) {
  return guarded([&] {
    require(out != nullptr, "output handle must not be NULL");
    require(n_col == 0 || col_angles != nullptr, "col_angles must not be NULL");
    require(n_row == 0 || row_angles != nullptr, "row_angles must not be NULL");
    GeneratorSpec spec;
    spec.family = parse_family(family);
    spec.h = h;
    spec.extent = extent;
    spec.spacing_convention = spacing_convention != 0;
    if (n_col > 0) spec.col_angles.assign(col_angles, col_angles + n_col);
    if (n_row > 0) spec.row_angles.assign(row_angles, row_angles + n_row);
    spec.track_margin = track_margin;
    auto handle = std::make_unique<isr_graph>();
    handle->g = generate(spec);
    handle->w = compute_weights(handle->g);
    handle->spec = spec;
    *out = handle.release();
  });
}

isr_status isr_graph_read_json(const char* path, isr_graph** out) {
  return guarded([&] {
    require(out != nullptr, "output handle must not be NULL");
    require(path != nullptr, "path must not be NULL");
    auto handle = std::make_unique<isr_graph>();
    io::StoredEdgeData stored;
    handle->g = io::read_graph_json(path, &handle->spec, &stored);
    handle->w = compute_weights(handle->g);
    handle->stored = std::move(stored);
    *out = handle.release();
  });
}

void isr_graph_free(isr_graph* g) { delete g; }

int isr_graph_vertex_count(const isr_graph* g) { return g ? g->g.n() : 0; }

int isr_graph_edge_count(const isr_graph* g) { return g ? g->g.m() : 0; }

double isr_graph_h(const isr_graph* g) { return g ? g->g.h : 0.0; }

const char* isr_graph_family(const isr_graph* g) {
  return g ? family_cstr(g->g.family) : "?";
}

int isr_graph_interior_count(const isr_graph* g) {
  if (!g) return 0;
  int count = 0;
  for (int u = 0; u < g->g.n(); ++u)
    if (g->g.is_interior(u)) ++count;
  return count;
}

isr_status isr_graph_vertex(const isr_graph* g, int u, double* x, double* y,
                            int* interior) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    check_vertex(g, u);
    if (x) *x = g->g.position[u].x;
    if (y) *y = g->g.position[u].y;
    if (interior) *interior = g->g.is_interior(u) ? 1 : 0;
  });
}

isr_status isr_graph_edge(const isr_graph* g, int e, int* u, int* v,
                          double* primal_len, double* dual_len) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    check_edge(g, e);
    if (u) *u = g->g.edge_u[e];
    if (v) *v = g->g.edge_v[e];
    if (primal_len) *primal_len = g->g.primal_length(e);
    if (dual_len) *dual_len = g->g.dual_length(e);
  });
}

int isr_graph_has_stored_lengths(const isr_graph* g) {
  return g && g->stored ? 1 : 0;
}

isr_status isr_graph_stored_lengths(const isr_graph* g, int e,
                                    double* primal_len, double* dual_len) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(g->stored.has_value(), "graph carries no stored edge lengths");
    check_edge(g, e);
    if (primal_len) *primal_len = g->stored->primal_len[e];
    if (dual_len) *dual_len = g->stored->dual_len[e];
  });
}

isr_status isr_graph_write_json(const isr_graph* g, const char* path) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(path != nullptr, "path must not be NULL");
    io::write_graph_json(g->g, path, g->spec ? &*g->spec : nullptr);
  });
}

isr_status isr_graph_project(const isr_graph* g, double x, double y,
                             int* vertex) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(vertex != nullptr, "output must not be NULL");
    *vertex = project(g->g, {x, y});
  });
}

isr_status isr_graph_combinatorial_distance(const isr_graph* g, int u, int v,
                                            int* d) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(d != nullptr, "output must not be NULL");
    check_vertex(g, u);
    check_vertex(g, v);
    *d = combinatorial_distance(g->g, u, v);
  });
}

isr_status isr_graph_weighted_distance(const isr_graph* g, int u, int v,
                                       double* d) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(d != nullptr, "output must not be NULL");
    check_vertex(g, u);
    check_vertex(g, v);
    *d = weighted_distance(g->g, u, v);
  });
}

isr_status isr_graph_validate(const isr_graph* g, double tol,
                              isr_validation* out) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(out != nullptr, "output must not be NULL");
    const ValidationReport r = validate_isoradial(g->g, tol);
    out->ok = r.ok ? 1 : 0;
    out->max_radius_deviation = r.max_radius_deviation;
    out->min_center_margin = r.min_center_margin;
    out->max_dual_orthogonality = r.max_dual_orthogonality;
    std::snprintf(out->detail, sizeof out->detail, "%s", r.detail.c_str());
  });
}

isr_status isr_graph_assumptions(const isr_graph* g, int exhaustive_limit,
                                 isr_assumptions* out) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(out != nullptr, "output must not be NULL");
    const AssumptionReport a = check_assumptions(g->g, exhaustive_limit);
    out->c_p = a.c_p;
    out->c_d = a.c_d;
    out->max_degree = a.max_degree;
    out->kappa_empirical = a.kappa_empirical;
  });
}

isr_status isr_graph_write_validation_csv(const isr_graph* g, double tol,
                                          int exhaustive_limit,
                                          const char* path) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(path != nullptr, "path must not be NULL");
    io::write_validation_csv(validate_isoradial(g->g, tol),
                             check_assumptions(g->g, exhaustive_limit), path);
  });
}

isr_status isr_graph_weight_constants(const isr_graph* g,
                                      isr_weight_constants* out) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(out != nullptr, "output must not be NULL");
    const WeightConstants& c = g->w.constants;
    out->c_p = c.c_p;
    out->c_d = c.c_d;
    out->max_degree = c.max_degree;
    out->kappa1 = c.kappa1;
    out->kappa2 = c.kappa2;
    out->alpha1 = c.alpha1;
    out->alpha2 = c.alpha2;
  });
}

isr_status isr_graph_vertex_weights(const isr_graph* g, int u, double* mass,
                                    double* dual_area, double* lambda) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    check_vertex(g, u);
    if (mass) *mass = g->w.vertex_mass[u];
    if (dual_area) *dual_area = g->w.dual_area[u];
    if (lambda) *lambda = g->w.lambda[u];
  });
}

isr_status isr_graph_apply_laplacian(const isr_graph* g, const double* f, int u,
                                     double* out) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(f != nullptr, "f must not be NULL");
    require(out != nullptr, "output must not be NULL");
    check_vertex(g, u);
    *out = apply_laplacian(g->g, g->w,
                           std::span<const double>(f, g->g.n()), u);
  });
}

isr_status isr_generator_assemble(const isr_graph* g, const char* variant,
                                  const char* boundary, isr_generator** out) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(variant != nullptr, "variant must not be NULL");
    require(boundary != nullptr, "boundary must not be NULL");
    require(out != nullptr, "output handle must not be NULL");
    const std::string vs = variant, bs = boundary;
    GeneratorVariant v;
    if (vs == "variable_speed") v = GeneratorVariant::variable_speed;
    else if (vs == "constant_speed") v = GeneratorVariant::constant_speed;
    else throw Error(ErrorCode::invalid_argument,
                     "unknown generator variant \"" + vs + "\"");
    BoundaryPolicy b;
    if (bs == "absorbing") b = BoundaryPolicy::absorbing;
    else if (bs == "closed_interior") b = BoundaryPolicy::closed_interior;
    else throw Error(ErrorCode::invalid_argument,
                     "unknown boundary policy \"" + bs + "\"");
    auto handle = std::make_unique<isr_generator>();
    handle->q = assemble_generator(g->g, g->w, v, b);
    *out = handle.release();
  });
}

void isr_generator_free(isr_generator* q) { delete q; }

double isr_generator_lambda_max(const isr_generator* q) {
  return q ? q->q.lambda_max : 0.0;
}

int isr_generator_active_count(const isr_generator* q) {
  if (!q) return 0;
  int count = 0;
  for (char a : q->q.active)
    if (a) ++count;
  return count;
}

isr_status isr_generator_write_triplets(const isr_generator* q,
                                        const char* path) {
  return guarded([&] {
    require(q != nullptr, "generator handle must not be NULL");
    require(path != nullptr, "path must not be NULL");
    io::write_generator_triplets(q->q, path);
  });
}

isr_status isr_kernel_row_new(const isr_generator* q, int u, double t,
                              double tol, isr_kernel_row** out) {
  return guarded([&] {
    require(q != nullptr, "generator handle must not be NULL");
    require(out != nullptr, "output handle must not be NULL");
    auto handle = std::make_unique<isr_kernel_row>();
    handle->row = kernel_row(q->q, u, t, tol);
    *out = handle.release();
  });
}

void isr_kernel_row_free(isr_kernel_row* row) { delete row; }

int isr_kernel_row_size(const isr_kernel_row* row) {
  return row ? static_cast<int>(row->row.vertices.size()) : 0;
}

isr_status isr_kernel_row_entry(const isr_kernel_row* row, int i, int* vertex,
                                double* value, double* log_value) {
  return guarded([&] {
    require(row != nullptr, "kernel row handle must not be NULL");
    require(i >= 0 && i < static_cast<int>(row->row.vertices.size()),
            "row index out of range");
    if (vertex) *vertex = row->row.vertices[i];
    if (value) *value = row->row.value(i);
    if (log_value)
      *log_value = std::log(row->row.scaled_value[i]) + row->row.log_scale;
  });
}

int isr_kernel_row_find(const isr_kernel_row* row, int v) {
  return row ? row->row.find(v) : -1;
}

double isr_kernel_row_mass(const isr_kernel_row* row) {
  return row ? row->row.mass() : 0.0;
}

double isr_kernel_row_leaked_mass_bound(const isr_kernel_row* row) {
  return row ? row->row.leaked_mass_bound : 0.0;
}

int isr_kernel_row_steps(const isr_kernel_row* row) {
  return row ? row->row.steps_used : 0;
}

isr_status isr_kernel_row_write_csv(const isr_kernel_row* row,
                                    const isr_graph* g, const char* path) {
  return guarded([&] {
    require(row != nullptr, "kernel row handle must not be NULL");
    require(g != nullptr, "graph handle must not be NULL");
    require(path != nullptr, "path must not be NULL");
    io::write_kernel_row_csv(row->row, g->g, path);
  });
}

isr_status isr_kernel_log_entry(const isr_generator* q, int u, int v, double t,
                                double rel_tol, isr_log_entry* out) {
  return guarded([&] {
    require(q != nullptr, "generator handle must not be NULL");
    require(out != nullptr, "output must not be NULL");
    const LogEntry e = kernel_log_entry(q->q, u, v, t, rel_tol);
    out->log_value = e.log_value;
    out->rel_error_bound = e.rel_error_bound;
    out->steps_used = e.steps_used;
    out->below_floor = e.below_floor ? 1 : 0;
  });
}

isr_status isr_kernel_moments(const isr_generator* q, const isr_graph* g, int u,
                              double t, double tol,
                              isr_displacement_moments* out) {
  return guarded([&] {
    require(q != nullptr, "generator handle must not be NULL");
    require(g != nullptr, "graph handle must not be NULL");
    require(out != nullptr, "output must not be NULL");
    const KernelMoments m = kernel_moments(q->q, g->g, u, t, tol);
    out->mass = m.mass;
    out->mean_x = m.mean.x;
    out->mean_y = m.mean.y;
    out->second_re = m.second_re;
    out->second_im = m.second_im;
    out->cross = m.cross;
    out->fourth_re = m.fourth_re;
    out->fourth_im = m.fourth_im;
    out->truncation_error = m.truncation_error;
  });
}

isr_status isr_kernel_event_ball(const isr_generator* q, const isr_graph* g,
                                 int u, double t, double cx, double cy,
                                 double radius, double tol, double* prob,
                                 double* err) {
  return guarded([&] {
    require(q != nullptr, "generator handle must not be NULL");
    require(g != nullptr, "graph handle must not be NULL");
    require(prob != nullptr, "output must not be NULL");
    const Point center{cx, cy};
    *prob = kernel_event_probability(
        q->q, g->g, u, t,
        [center, radius](Point p) { return norm2(p - center) < radius * radius; },
        tol, err);
  });
}

isr_status isr_walk_sample(const isr_graph* g, int u0, double horizon,
                           uint64_t seed, isr_trajectory** out) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(out != nullptr, "output handle must not be NULL");
    auto handle = std::make_unique<isr_trajectory>();
    handle->traj = sample_trajectory(g->g, g->w, u0, horizon, seed);
    *out = handle.release();
  });
}

void isr_trajectory_free(isr_trajectory* traj) { delete traj; }

int isr_trajectory_jumps(const isr_trajectory* traj) {
  return traj ? traj->traj.jumps() : 0;
}

isr_status isr_trajectory_entry(const isr_trajectory* traj, int k, int* vertex,
                                double* time) {
  return guarded([&] {
    require(traj != nullptr, "trajectory handle must not be NULL");
    require(k >= 0 && k <= traj->traj.jumps(), "jump index out of range");
    if (vertex) *vertex = traj->traj.vertex[k];
    if (time) *time = k == 0 ? 0.0 : traj->traj.jump_time[k - 1];
  });
}

isr_status isr_trajectory_state_at(const isr_trajectory* traj, double t,
                                   int* vertex) {
  return guarded([&] {
    require(traj != nullptr, "trajectory handle must not be NULL");
    require(vertex != nullptr, "output must not be NULL");
    *vertex = traj->traj.state_at(t);
  });
}

isr_status isr_trajectory_time_change(const isr_trajectory* traj,
                                      const isr_graph* g, int inverse,
                                      isr_trajectory** out) {
  return guarded([&] {
    require(traj != nullptr, "trajectory handle must not be NULL");
    require(g != nullptr, "graph handle must not be NULL");
    require(out != nullptr, "output handle must not be NULL");
    auto handle = std::make_unique<isr_trajectory>();
    handle->traj = inverse ? time_change_inverse(traj->traj, g->w)
                           : time_change(traj->traj, g->w);
    *out = handle.release();
  });
}

isr_status isr_trajectory_write_csv(const isr_trajectory* traj,
                                    const isr_graph* g, const char* path) {
  return guarded([&] {
    require(traj != nullptr, "trajectory handle must not be NULL");
    require(g != nullptr, "graph handle must not be NULL");
    require(path != nullptr, "path must not be NULL");
    io::write_trajectory_csv(traj->traj, g->g, path);
  });
}

namespace {

EmpiricalMoments to_cpp(const isr_empirical_moments& m) {
  EmpiricalMoments out;
  out.samples = m.samples;
  out.mean = {m.mean_x, m.mean_y};
  out.mean_se = {m.mean_se_x, m.mean_se_y};
  out.var_re = m.var_re;
  out.var_im = m.var_im;
  out.var_re_se = m.var_re_se;
  out.var_im_se = m.var_im_se;
  out.cov = m.cov;
  out.cov_se = m.cov_se;
  out.fourth_ratio_re = m.fourth_ratio_re;
  out.fourth_ratio_im = m.fourth_ratio_im;
  return out;
}

}  // namespace

isr_status isr_walk_moments(const isr_graph* g, int u0, double horizon,
                            int64_t samples, uint64_t seed, int threads,
                            isr_empirical_moments* out) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(out != nullptr, "output must not be NULL");
    const EmpiricalMoments m =
        empirical_moments(g->g, g->w, u0, horizon, samples, seed, threads);
    out->samples = m.samples;
    out->mean_x = m.mean.x;
    out->mean_y = m.mean.y;
    out->mean_se_x = m.mean_se.x;
    out->mean_se_y = m.mean_se.y;
    out->var_re = m.var_re;
    out->var_im = m.var_im;
    out->var_re_se = m.var_re_se;
    out->var_im_se = m.var_im_se;
    out->cov = m.cov;
    out->cov_se = m.cov_se;
    out->fourth_ratio_re = m.fourth_ratio_re;
    out->fourth_ratio_im = m.fourth_ratio_im;
  });
}

isr_status isr_walk_moments_write_json(const isr_empirical_moments* m,
                                       const char* path) {
  return guarded([&] {
    require(m != nullptr, "moments must not be NULL");
    require(path != nullptr, "path must not be NULL");
    io::write_moments_json(to_cpp(*m), path);
  });
}

isr_status isr_bounds_metzger(const isr_graph* g, int x, int y, double t,
                              int n_max, isr_path_bound* out) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(out != nullptr, "output must not be NULL");
    const PathProductBound b = metzger_bounds(g->g, g->w, x, y, t, n_max);
    out->log_lower = b.log_lower;
    out->log_upper = b.log_upper;
    out->n_lower = b.n_lower;
    out->n_upper = b.n_upper;
    out->n_max = b.n_max;
    out->cutoff_certified = b.cutoff_certified ? 1 : 0;
  });
}

isr_status isr_bounds_improved_lower(const isr_graph* g, int x, int y, double t,
                                     double h, double beta, double* out) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(out != nullptr, "output must not be NULL");
    *out = improved_lower_bound(g->g, g->w, x, y, t, h, beta);
  });
}

isr_status isr_bounds_volume(const isr_graph* g, int u, int n, double* out) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(out != nullptr, "output must not be NULL");
    *out = volume(g->g, g->w, u, n);
  });
}

isr_status isr_bounds_growth_fit(const isr_graph* g, int u, int n_min,
                                 int n_max, double* exponent, double* intercept,
                                 double* max_residual) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    const GrowthFit f = volume_growth_fit(g->g, g->w, u, n_min, n_max);
    if (exponent) *exponent = f.exponent;
    if (intercept) *intercept = f.intercept;
    if (max_residual) *max_residual = f.max_residual;
  });
}

isr_status isr_bounds_poincare(const isr_graph* g, int u0, int n, double* out) {
  return guarded([&] {
    require(g != nullptr, "graph handle must not be NULL");
    require(out != nullptr, "output must not be NULL");
    *out = poincare_constant(g->g, g->w, u0, n);
  });
}

isr_status isr_bounds_gaussian_fit(const isr_generator* q, const isr_graph* g,
                                   const int* us, const int* vs, int n_pairs,
                                   const double* times, int n_times,
                                   isr_gaussian_fit* out) {
  return guarded([&] {
    require(q != nullptr, "generator handle must not be NULL");
    require(g != nullptr, "graph handle must not be NULL");
    require(out != nullptr, "output must not be NULL");
    require(n_pairs == 0 || (us != nullptr && vs != nullptr),
            "pair arrays must not be NULL when n_pairs > 0");
    require(n_times == 0 || times != nullptr,
            "times must not be NULL when n_times > 0");
    std::vector<VertexPair> pairs(n_pairs);
    for (int i = 0; i < n_pairs; ++i) pairs[i] = {us[i], vs[i]};
    const GaussianFit f = gaussian_lower_fit(
        q->q, g->g, g->w, pairs, std::vector<double>(times, times + n_times));
    out->c_lower = f.c_lower;
    out->big_c_lower = f.C_lower;
    out->worst_slack = f.worst_slack;
    out->samples_used = f.samples_used;
    out->holds = f.holds ? 1 : 0;
  });
}

isr_status isr_sweep_euclidean(const isr_sweep_config* cfg, isr_sweep** out) {
  return guarded([&] {
    require(out != nullptr, "output handle must not be NULL");
    auto handle = std::make_unique<isr_sweep>();
    handle->result = euclidean_sweep(convert_config(cfg));
    *out = handle.release();
  });
}

isr_status isr_sweep_graph(const isr_sweep_config* cfg, isr_sweep** out) {
  return guarded([&] {
    require(out != nullptr, "output handle must not be NULL");
    auto handle = std::make_unique<isr_sweep>();
    handle->result = graph_sweep(convert_config(cfg));
    *out = handle.release();
  });
}

isr_status isr_sweep_ldp(const isr_sweep_config* cfg, double center_x,
                         double center_y, double radius, double T,
                         isr_sweep** out) {
  return guarded([&] {
    require(out != nullptr, "output handle must not be NULL");
    auto handle = std::make_unique<isr_sweep>();
    const BallRegion region{{center_x, center_y}, radius};
    handle->result = ldp_sweep(convert_config(cfg), region, T);
    *out = handle.release();
  });
}

void isr_sweep_free(isr_sweep* s) { delete s; }

int isr_sweep_row_count(const isr_sweep* s) {
  return s ? static_cast<int>(s->result.rows.size()) : 0;
}

isr_status isr_sweep_get_row(const isr_sweep* s, int i, isr_sweep_row* out) {
  return guarded([&] {
    require(s != nullptr, "sweep handle must not be NULL");
    require(out != nullptr, "output must not be NULL");
    require(i >= 0 && i < static_cast<int>(s->result.rows.size()),
            "row index out of range");
    const SweepRow& r = s->result.rows[i];
    out->h = r.h;
    out->dc = r.dc;
    out->h_dc = r.h_dc;
    out->log_value = r.log_value;
    out->scaled = r.scaled;
    out->target = r.target;
    out->gap = r.gap;
    out->error_bound = r.error_bound;
    out->certified = r.certified ? 1 : 0;
    out->accepted = r.accepted ? 1 : 0;
    out->window_extent = r.window_extent;
    out->steps_used = r.steps_used;
  });
}

const char* isr_sweep_verdict(const isr_sweep* s) {
  if (!s) return "?";
  return s->result.verdict == Verdict::converging ? "converging"
                                                  : "inconclusive";
}

double isr_sweep_gap_threshold(const isr_sweep* s) {
  return s ? s->result.gap_threshold : 0.0;
}

isr_status isr_sweep_write_csv(const isr_sweep* s, const char* path) {
  return guarded([&] {
    require(s != nullptr, "sweep handle must not be NULL");
    require(path != nullptr, "path must not be NULL");
    io::write_sweep_csv(s->result, path);
  });
}

isr_status isr_sweep_write_json(const isr_sweep* s, const char* path) {
  return guarded([&] {
    require(s != nullptr, "sweep handle must not be NULL");
    require(path != nullptr, "path must not be NULL");
    io::write_sweep_json(s->result, path);
  });
}

isr_status isr_sweep_write_plot(const isr_sweep* s, const char* path) {
  return guarded([&] {
    require(s != nullptr, "sweep handle must not be NULL");
    require(path != nullptr, "path must not be NULL");
    io::write_plot_data(s->result, path);
  });
}

}  // extern "C"
