/* C interface to the isoradial heat-kernel library.
 *
 * Every object is an opaque handle created by an isr_*_new-style call and
 * released by the matching isr_*_free. Functions that can fail return
 * isr_status; on failure the output parameters are untouched and a
 * description is available from isr_last_error() (thread-local, valid until
 * the next call on the same thread). Handles are immutable after creation
 * and may be shared across threads.
 */
#ifndef ISORADIAL_H
#define ISORADIAL_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum isr_status {
  ISR_OK = 0,
  ISR_ERR_INVALID_ARGUMENT = 1, /* bad parameter value */
  ISR_ERR_GEOMETRY = 2,         /* isoradiality or embedding violated */
  ISR_ERR_WINDOW_TOO_SMALL = 3, /* certified computation hit the window edge */
  ISR_ERR_DISCONNECTED = 4,
  ISR_ERR_BOUNDARY = 5,         /* operation needs interior vertices only */
  ISR_ERR_IO = 6,
  ISR_ERR_CONFIG = 7,
  ISR_ERR_INTERNAL = 8,
  ISR_ERR_UNKNOWN = 9
} isr_status;

const char* isr_version(void);

/* Message for the most recent failure on this thread; "" after a success. */
const char* isr_last_error(void);

/* ------------------------------------------------------------------ graphs */

typedef struct isr_graph isr_graph;

/* family: "square", "triangular", or "rhombic_tracks".
 * h: circumcircle diameter, or the lattice spacing when spacing_convention
 *    is nonzero (square / triangular only).
 * extent: window half-width in lattice steps, >= 1.
 * col_angles/row_angles (rhombic_tracks only; pass NULL/0 for defaults):
 *    track direction angles, cycled to the window size.
 * track_margin: minimum angular separation enforced between crossing tracks.
 */
isr_status isr_graph_generate(const char* family, double h, int extent,
                              int spacing_convention,
                              const double* col_angles, int n_col,
                              const double* row_angles, int n_row,
                              double track_margin, isr_graph** out);

/* Loads a graph file, rebuilds all derived structure from the stored
 * positions and faces, and verifies the stored interior flags and
 * circumcenters against the rebuild. Stored edge lengths are kept available
 * through isr_graph_stored_lengths but are NOT validated here. */
isr_status isr_graph_read_json(const char* path, isr_graph** out);

void isr_graph_free(isr_graph* g);

int isr_graph_vertex_count(const isr_graph* g);
int isr_graph_edge_count(const isr_graph* g);
double isr_graph_h(const isr_graph* g);
const char* isr_graph_family(const isr_graph* g);
int isr_graph_interior_count(const isr_graph* g);

isr_status isr_graph_vertex(const isr_graph* g, int u, double* x, double* y,
                            int* interior);
/* primal_len/dual_len are measured from the embedding. */
isr_status isr_graph_edge(const isr_graph* g, int e, int* u, int* v,
                          double* primal_len, double* dual_len);

/* Edge lengths as stored in the file this graph was read from; absent for
 * generated graphs. */
int isr_graph_has_stored_lengths(const isr_graph* g);
isr_status isr_graph_stored_lengths(const isr_graph* g, int e, double* primal_len,
                                    double* dual_len);

isr_status isr_graph_write_json(const isr_graph* g, const char* path);

/* Nearest vertex to (x, y); ties go to the smallest position. */
isr_status isr_graph_project(const isr_graph* g, double x, double y, int* vertex);
isr_status isr_graph_combinatorial_distance(const isr_graph* g, int u, int v,
                                            int* d);
isr_status isr_graph_weighted_distance(const isr_graph* g, int u, int v,
                                       double* d);

typedef struct isr_validation {
  int ok;
  double max_radius_deviation;
  double min_center_margin;
  double max_dual_orthogonality;
  char detail[240]; /* empty when ok; truncated to fit */
} isr_validation;

isr_status isr_graph_validate(const isr_graph* g, double tol,
                              isr_validation* out);

typedef struct isr_assumptions {
  double c_p;
  double c_d;
  int max_degree;
  double kappa_empirical;
} isr_assumptions;

isr_status isr_graph_assumptions(const isr_graph* g, int exhaustive_limit,
                                 isr_assumptions* out);

isr_status isr_graph_write_validation_csv(const isr_graph* g, double tol,
                                          int exhaustive_limit,
                                          const char* path);

/* Geometric weight data (computed from the embedding at graph creation). */
typedef struct isr_weight_constants {
  double c_p;
  double c_d;
  int max_degree;
  double kappa1; /* min dual-cell area / h^2, interior vertices */
  double kappa2; /* max of the same */
  double alpha1; /* min h^2 * mu over interior directed edges */
  double alpha2; /* max of the same */
} isr_weight_constants;

isr_status isr_graph_weight_constants(const isr_graph* g,
                                      isr_weight_constants* out);

/* mass = sum of incident omega; dual_area and lambda are 0 for non-interior
 * vertices. */
isr_status isr_graph_vertex_weights(const isr_graph* g, int u, double* mass,
                                    double* dual_area, double* lambda);

/* Geometric Laplacian of f (length n) at vertex u:
 * (1/A_u) sum_{v ~ u} omega_uv (f(v) - f(u)). Interior u only. */
isr_status isr_graph_apply_laplacian(const isr_graph* g, const double* f, int u,
                                     double* out);

/* -------------------------------------------------------------- generators */

typedef struct isr_generator isr_generator;

/* variant: "variable_speed" or "constant_speed".
 * boundary: "absorbing" or "closed_interior". */
isr_status isr_generator_assemble(const isr_graph* g, const char* variant,
                                  const char* boundary, isr_generator** out);
void isr_generator_free(isr_generator* q);

double isr_generator_lambda_max(const isr_generator* q);
int isr_generator_active_count(const isr_generator* q);

/* One "row col value" triplet per line, diagonal included. */
isr_status isr_generator_write_triplets(const isr_generator* q, const char* path);

/* ------------------------------------------------------------ heat kernel */

typedef struct isr_kernel_row isr_kernel_row;

/* Row u of exp(tQ), every entry accurate to an additive tol. */
isr_status isr_kernel_row_new(const isr_generator* q, int u, double t,
                              double tol, isr_kernel_row** out);
void isr_kernel_row_free(isr_kernel_row* row);

int isr_kernel_row_size(const isr_kernel_row* row);
isr_status isr_kernel_row_entry(const isr_kernel_row* row, int i, int* vertex,
                                double* value, double* log_value);
/* Index of vertex v within the row, -1 if the row does not reach it. */
int isr_kernel_row_find(const isr_kernel_row* row, int v);
double isr_kernel_row_mass(const isr_kernel_row* row);
double isr_kernel_row_leaked_mass_bound(const isr_kernel_row* row);
int isr_kernel_row_steps(const isr_kernel_row* row);
isr_status isr_kernel_row_write_csv(const isr_kernel_row* row,
                                    const isr_graph* g, const char* path);

typedef struct isr_log_entry {
  double log_value;       /* natural log of p_t(u, v) */
  double rel_error_bound; /* relative truncation error of exp(log_value) */
  int steps_used;
  int below_floor; /* nonzero: provably below the floor, log_value = -inf */
} isr_log_entry;

/* log p_t(u, v) accurate to rel_tol even when p underflows a double. */
isr_status isr_kernel_log_entry(const isr_generator* q, int u, int v, double t,
                                double rel_tol, isr_log_entry* out);

typedef struct isr_displacement_moments {
  double mass;
  double mean_x, mean_y;
  double second_re, second_im;
  double cross;
  double fourth_re, fourth_im;
  double truncation_error;
} isr_displacement_moments;

isr_status isr_kernel_moments(const isr_generator* q, const isr_graph* g, int u,
                              double t, double tol,
                              isr_displacement_moments* out);

/* P[X_t in the open ball B(center, radius)], additive error <= tol; the
 * realized error bound is written to *err when non-NULL. */
isr_status isr_kernel_event_ball(const isr_generator* q, const isr_graph* g,
                                 int u, double t, double cx, double cy,
                                 double radius, double tol, double* prob,
                                 double* err);

/* ------------------------------------------------------------ random walk */

typedef struct isr_trajectory isr_trajectory;

/* Variable-speed walk from u0 up to the horizon; deterministic in the seed.
 * Fails with ISR_ERR_BOUNDARY if the walk would leave the interior. */
isr_status isr_walk_sample(const isr_graph* g, int u0, double horizon,
                           uint64_t seed, isr_trajectory** out);
void isr_trajectory_free(isr_trajectory* traj);

int isr_trajectory_jumps(const isr_trajectory* traj);
/* k = 0 returns the start (time 0); k = 1..jumps returns the k-th jump. */
isr_status isr_trajectory_entry(const isr_trajectory* traj, int k, int* vertex,
                                double* time);
isr_status isr_trajectory_state_at(const isr_trajectory* traj, double t,
                                   int* vertex);
/* Reclocks between the variable-speed and constant-speed time scales
 * (inverse nonzero undoes it). The vertex sequence is unchanged. */
isr_status isr_trajectory_time_change(const isr_trajectory* traj,
                                      const isr_graph* g, int inverse,
                                      isr_trajectory** out);
isr_status isr_trajectory_write_csv(const isr_trajectory* traj,
                                    const isr_graph* g, const char* path);

typedef struct isr_empirical_moments {
  int64_t samples;
  double mean_x, mean_y;
  double mean_se_x, mean_se_y;
  double var_re, var_im;
  double var_re_se, var_im_se;
  double cov, cov_se;
  double fourth_ratio_re, fourth_ratio_im; /* E[d^4] / (3 E[d^2]^2) */
} isr_empirical_moments;

/* Monte Carlo displacement moments at the horizon; identical results for any
 * thread count (threads = 0 uses the hardware count). */
isr_status isr_walk_moments(const isr_graph* g, int u0, double horizon,
                            int64_t samples, uint64_t seed, int threads,
                            isr_empirical_moments* out);
isr_status isr_walk_moments_write_json(const isr_empirical_moments* m,
                                       const char* path);

/* ----------------------------------------------------------------- bounds */

typedef struct isr_path_bound {
  double log_lower;
  double log_upper;
  int n_lower; /* maximizing path length inside the lower envelope */
  int n_upper;
  int n_max;
  int cutoff_certified; /* longer paths provably cannot raise the max */
} isr_path_bound;

/* Path-product sandwich on log p_t(x, y) of the variable-speed kernel.
 * n_max <= 0 picks a self-certifying default. */
isr_status isr_bounds_metzger(const isr_graph* g, int x, int y, double t,
                              int n_max, isr_path_bound* out);

/* Single-length lower bound on log p at walk time h^beta * t; requires
 * d^c(x, y) > mu_min * h^beta * t. */
isr_status isr_bounds_improved_lower(const isr_graph* g, int x, int y, double t,
                                     double h, double beta, double* out);

/* Mass of the combinatorial n-ball: sum of vertex masses m_v over it. */
isr_status isr_bounds_volume(const isr_graph* g, int u, int n, double* out);

/* Least-squares exponent of log volume against log radius on [n_min, n_max]. */
isr_status isr_bounds_growth_fit(const isr_graph* g, int u, int n_min, int n_max,
                                 double* exponent, double* intercept,
                                 double* max_residual);

/* Smallest C with sum_{B_n} m_v (f - fbar)^2 <= C n^2 E(f) for all f on
 * B_2n; B_2n must be interior. */
isr_status isr_bounds_poincare(const isr_graph* g, int u0, int n, double* out);

typedef struct isr_gaussian_fit {
  double c_lower;
  double big_c_lower;
  double worst_slack;
  int samples_used;
  int holds;
} isr_gaussian_fit;

/* Fits constant-speed Gaussian lower-bound constants over the (us[i], vs[i])
 * pairs at the given times; q must be a constant-speed generator. */
isr_status isr_bounds_gaussian_fit(const isr_generator* q, const isr_graph* g,
                                   const int* us, const int* vs, int n_pairs,
                                   const double* times, int n_times,
                                   isr_gaussian_fit* out);

/* ----------------------------------------------------------------- sweeps */

typedef struct isr_sweep isr_sweep;

typedef struct isr_sweep_config {
  const char* family;     /* "square", "triangular", "rhombic_tracks" */
  int square_spacing;     /* interpret h as lattice spacing (exact h * d^c) */
  double x[2];
  double y[2];
  double t;
  double beta;
  const double* h_values; /* strictly decreasing */
  int h_count;
  double tol;             /* relative tolerance for kernel log entries */
  double gap_threshold;   /* final |gap| promoted to a converging verdict */
  int threads;
  int extent_override;    /* > 0 forces the window half-width */
} isr_sweep_config;

/* h^beta log p_{h^beta t}(x, y) against -|x-y|^2/(2t); beta in (0, 1). */
isr_status isr_sweep_euclidean(const isr_sweep_config* cfg, isr_sweep** out);
/* (h / log h^(beta-1)) log p_{h^beta t}(x, y) against h d^c; beta > 1. */
isr_status isr_sweep_graph(const isr_sweep_config* cfg, isr_sweep** out);
/* h^beta log P[X_{h^beta T} in B(center, radius)] against the quadratic
 * rate target; beta in (0, 1); cfg->t is ignored in favor of T. */
isr_status isr_sweep_ldp(const isr_sweep_config* cfg, double center_x,
                         double center_y, double radius, double T,
                         isr_sweep** out);
void isr_sweep_free(isr_sweep* s);

typedef struct isr_sweep_row {
  double h;
  int dc;
  double h_dc;
  double log_value;
  double scaled;
  double target;
  double gap;
  double error_bound;
  int certified;
  int accepted;
  int window_extent;
  int steps_used;
} isr_sweep_row;

int isr_sweep_row_count(const isr_sweep* s);
isr_status isr_sweep_get_row(const isr_sweep* s, int i, isr_sweep_row* out);
/* "converging" or "inconclusive". */
const char* isr_sweep_verdict(const isr_sweep* s);
double isr_sweep_gap_threshold(const isr_sweep* s);

isr_status isr_sweep_write_csv(const isr_sweep* s, const char* path);
isr_status isr_sweep_write_json(const isr_sweep* s, const char* path);
/* h,value,target rows for external plotting. */
isr_status isr_sweep_write_plot(const isr_sweep* s, const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ISORADIAL_H */
