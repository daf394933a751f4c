/* C interface to the danzer library. Every call returns a dz_status; on
 * failure dz_last_error() describes the problem (thread-local, valid until
 * the next failing call on the same thread). */
#ifndef DANZER_DANZER_H
#define DANZER_DANZER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DZ_API __declspec(dllexport)
#else
#define DZ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dz_status {
  DZ_OK = 0,
  DZ_ERR_INVALID_ARGUMENT = 1,
  DZ_ERR_BUDGET_EXCEEDED = 2,
  DZ_ERR_OVERFLOW = 3,
  DZ_ERR_INFEASIBLE = 4,
  DZ_ERR_INTERNAL = 5
} dz_status;

#define DZ_MAX_DIM 16

DZ_API const char* dz_last_error(void);
DZ_API const char* dz_version(void);

/* ---- point sets ------------------------------------------------------- */

typedef struct dz_pointset dz_pointset;

DZ_API dz_status dz_pointset_create(size_t dim, const double* flat, size_t count, dz_pointset** out);
DZ_API void dz_pointset_free(dz_pointset* ps);
DZ_API size_t dz_pointset_dim(const dz_pointset* ps);
DZ_API size_t dz_pointset_size(const dz_pointset* ps);
/* Row-major coordinates, size() * dim() values; owned by the set. */
DZ_API const double* dz_pointset_data(const dz_pointset* ps);
/* "# dim=<d>" header then one point per line; path NULL or "-" writes stdout. */
DZ_API dz_status dz_pointset_write_csv(const dz_pointset* ps, const char* path);

/* ---- forests ---------------------------------------------------------- */

typedef struct dz_forest dz_forest;

typedef enum dz_forest_kind {
  DZ_FOREST_LATTICE = 0,
  DZ_FOREST_PERES = 1,
  DZ_FOREST_FINITE = 2
} dz_forest_kind;

typedef enum dz_sequence_kind {
  DZ_SEQ_GOLDEN = 0,
  DZ_SEQ_SUD = 1
} dz_sequence_kind;

DZ_API dz_status dz_forest_corollary(size_t dim, double eta, dz_forest** out);
/* Generic forest from a schedule (epsilon[j], visibility[j]) and a certified tail bound. */
DZ_API dz_status dz_forest_theorem(size_t dim, const double* epsilon, const double* visibility, size_t count,
                                   double tail_bound, dz_forest** out);
DZ_API dz_status dz_forest_optical(size_t dim, dz_forest** out);
DZ_API dz_status dz_forest_peres(dz_sequence_kind kind, dz_forest** out);
DZ_API dz_status dz_forest_peres_user(const double* values, size_t count, dz_forest** out);
/* Finite point source over a copy of the set. */
DZ_API dz_status dz_forest_from_points(const dz_pointset* ps, dz_forest** out);
DZ_API void dz_forest_free(dz_forest* f);

DZ_API size_t dz_forest_dim(const dz_forest* f);
DZ_API dz_forest_kind dz_forest_get_kind(const dz_forest* f);
/* Number of schedule entries (0 for forests without a visibility schedule). */
DZ_API size_t dz_forest_schedule_size(const dz_forest* f);
/* Entry j (1-based) of the schedule. */
DZ_API dz_status dz_forest_schedule_entry(const dz_forest* f, size_t j, double* epsilon, double* visibility);
DZ_API dz_status dz_forest_visibility(const dz_forest* f, double epsilon, double* out);
DZ_API dz_status dz_forest_density_index(const dz_forest* f, double T, int* out);
DZ_API dz_status dz_forest_density_bound(const dz_forest* f, int j_max, double* out);
DZ_API dz_status dz_forest_tail_bound(const dz_forest* f, double* out);
/* Coarse hyperplane coordinates for adversarial sampling; fills up to cap values. */
DZ_API dz_status dz_forest_hyperplanes(const dz_forest* f, double* out, size_t cap, size_t* count);

/* Points inside the closed box [lo, hi], each once, deterministic order. budget 0 means the default. */
DZ_API dz_status dz_forest_enumerate(const dz_forest* f, const double* lo, const double* hi, uint64_t budget,
                                     dz_pointset** out);
DZ_API dz_status dz_forest_count_in_ball(const dz_forest* f, double T, uint64_t budget, uint64_t* out);

/* ---- epsilon nets ------------------------------------------------------ */

typedef struct dz_net_info {
  size_t dim;
  int n;
  double epsilon;
  double tau;
  size_t cardinality;
  double bound_ratio;
} dz_net_info;

DZ_API dz_status dz_epsilon_net(size_t dim, int n, uint64_t budget, dz_net_info* info, dz_pointset** out);
DZ_API dz_status dz_net_index_for_epsilon(size_t dim, double epsilon, int* n);

/* ---- verifiers ------------------------------------------------------- */

typedef enum dz_placement {
  DZ_PLACE_INSIDE = 0,
  DZ_PLACE_ANCHORED = 1
} dz_placement;

typedef struct dz_sampler {
  uint64_t seed;
  size_t count;
  double length;
  size_t dim;
  double region_lo[DZ_MAX_DIM];
  double region_hi[DZ_MAX_DIM];
  int include_adversarial;
  dz_placement placement;
} dz_sampler;

typedef struct dz_visibility_report {
  double epsilon;
  double segment_length;
  double worst_min_distance;
  size_t witness_index;
  double witness_a[DZ_MAX_DIM];
  double witness_b[DZ_MAX_DIM];
  size_t segments;
  int pass;
} dz_visibility_report;

/* Hyperplane hints of the forest are added to the adversarial set. */
DZ_API dz_status dz_visibility_probe(const dz_forest* f, const dz_sampler* sampler, double epsilon, unsigned threads,
                                     dz_visibility_report* out);

typedef struct dz_curve_point {
  double epsilon;
  double min_length; /* 0 when no ladder length passes */
  int bounded;
} dz_curve_point;

typedef struct dz_curve_summary {
  int monotone;
  double baseline_constant;
  int baseline_ok;
  double dominance_constant; /* 0 when not requested */
} dz_curve_summary;

/* epsilons strictly decreasing; out has room for count points. dominance_power <= 0 disables it. */
DZ_API dz_status dz_visibility_curve(const dz_forest* f, const dz_sampler* sampler, const double* epsilons, size_t count,
                                     double ladder_min, double ladder_max, double ladder_factor,
                                     double dominance_power, unsigned threads, dz_curve_point* out,
                                     dz_curve_summary* summary);

/* Box outputs have room for dim values. */
DZ_API dz_status dz_largest_empty_rectangle(const dz_pointset* ps, double* area, double* lo, double* hi);
DZ_API dz_status dz_empty_box_search(const dz_pointset* ps, int resolution_log2, unsigned threads, double* volume,
                                     double* lo, double* hi, int* certifying);

typedef struct dz_growth_row {
  double T;
  uint64_t count;
  double per_volume;
  double per_volume_log;
} dz_growth_row;

typedef struct dz_growth_summary {
  double band_volume;
  double band_volume_log;
  double max_per_volume;
  double max_per_volume_log;
} dz_growth_summary;

/* Exact ball counts of the forest along an increasing ladder of radii > 1. */
DZ_API dz_status dz_growth_fit(const dz_forest* f, const double* T, size_t count, uint64_t budget, dz_growth_row* rows,
                               dz_growth_summary* summary);

/* ---- sequences -------------------------------------------------------- */

typedef struct dz_dyadic {
  uint64_t numerator;
  unsigned log2_denominator;
} dz_dyadic;

DZ_API dz_status dz_decompose_index(uint64_t n, int* i, uint64_t* k);
DZ_API dz_status dz_recompose_index(int i, uint64_t k, uint64_t* n);
DZ_API dz_status dz_block_decompose(uint64_t k, int i, uint64_t* r, uint64_t* s);
DZ_API dz_status dz_u_value(uint64_t n, dz_dyadic* out);
DZ_API dz_status dz_interleave(uint64_t n, dz_dyadic* out);
DZ_API dz_status dz_golden(uint64_t n, double* out);
/* Numerators of block i over 2^{i^2}; with out NULL only the length is reported. */
DZ_API dz_status dz_block_values(int i, uint64_t* out, size_t cap, size_t* length);

DZ_API dz_status dz_exact_dispersion(const dz_dyadic* points, size_t count, dz_dyadic* out);
DZ_API dz_status dz_exact_dispersion_real(const double* points, size_t count, double* out);
DZ_API dz_status dz_perturbed_dispersion_sud(uint64_t N, uint64_t m, dz_dyadic xi, dz_dyadic* out);
DZ_API dz_status dz_perturbed_dispersion_golden(uint64_t N, uint64_t m, double xi, double* out);
DZ_API dz_status dz_delta_lower_bound_sud(uint64_t N, uint64_t m_max, unsigned xi_log2, dz_dyadic* value,
                                          uint64_t* argmax_m, dz_dyadic* argmax_xi);
DZ_API dz_status dz_w_constants(double epsilon, int* i, double* lemma, double* theorem);

typedef struct dz_block_report {
  int i;
  int u;
  uint64_t block_length;
  dz_dyadic window_defect;
  int window_check;
  int grid_evaluated;
  dz_dyadic grid_defect;
  int grid_check;
  double continuum_bound;
  dz_dyadic continuum_lower;
  int continuum_complete;
  int cell_depth;
  uint64_t cells;
  uint64_t work;
  char route[128];
  int pass;
  double certified_bound; /* 0 when not certified */
} dz_block_report;

typedef struct dz_block_options {
  uint64_t grid_budget;      /* 0 means the default */
  uint64_t continuum_budget; /* 0 means the default */
  unsigned threads;
} dz_block_options;

DZ_API dz_status dz_block_verify(int i, const dz_block_options* opt, dz_block_report* out);
/* Same checks on an arbitrary block of numerators over 2^{i^2}. */
DZ_API dz_status dz_block_verify_values(int i, const uint64_t* numerators, size_t count, const dz_block_options* opt,
                                        dz_block_report* out);

#ifdef __cplusplus
}
#endif

#endif
