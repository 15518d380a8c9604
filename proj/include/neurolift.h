/* C interface to the neurolift MRF MAP-inference library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return NL_OK on success; on failure nl_last_error() gives a
 * thread-local human-readable message.
 */
#ifndef NEUROLIFT_H
#define NEUROLIFT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nl_status {
    NL_OK = 0,
    NL_ERR_PARSE = 1,       /* malformed input file */
    NL_ERR_IO = 2,          /* file system failure */
    NL_ERR_INVALID = 3,     /* invalid argument or configuration */
    NL_ERR_UNSUPPORTED = 4, /* e.g. high-order instance given to LBP/TRBP */
    NL_ERR_TOO_LARGE = 5,   /* enumeration budget exceeded */
    NL_ERR_INTERNAL = 6
} nl_status;

typedef struct nl_instance nl_instance; /* canonical energy-based MRF */
typedef struct nl_report nl_report;     /* result of one solve */
typedef struct nl_model nl_model;       /* trained lifted model */

const char* nl_last_error(void);

/* ---- instances ------------------------------------------------------- */

/* Parse a UAI file and convert potentials to energies (-log). When
 * clamp != 0, non-positive potentials are replaced by clamp_eps. */
nl_status nl_instance_load_uai(const char* path, int clamp, double clamp_eps,
                               nl_instance** out);

/* Reduce a PCI problem (JSON schema) to a pairwise MRF. */
nl_status nl_instance_load_pci(const char* path, nl_instance** out);

void nl_instance_free(nl_instance* inst);

int nl_instance_n_vars(const nl_instance* inst);
int nl_instance_n_cliques(const nl_instance* inst);
int nl_instance_cardinality(const nl_instance* inst, int var);

/* Exact energy of a full assignment (one state per variable). */
nl_status nl_instance_energy(const nl_instance* inst, const int* assignment,
                             int len, double* out);

/* Emit the instance as a UAI file (potentials = exp(-energy)). */
nl_status nl_instance_export_uai(const nl_instance* inst, const char* path);

/* ---- generation ------------------------------------------------------ */

typedef struct nl_gen_params {
    int n_vars;
    double edge_prob;   /* used when > 0 */
    double mean_degree; /* otherwise p = mean_degree / (n-1) */
    int highorder;      /* add 3/4-cliques on top of the pairwise edges */
    int n_hyper;        /* 0 = default count */
    int potts;          /* Potts energies instead of uniform random */
    int smin, smax;     /* state count range, default [2, 6] */
    uint64_t seed;
} nl_gen_params;

void nl_gen_params_default(nl_gen_params* p);

/* Write a generated instance as UAI; optionally append a manifest line. */
nl_status nl_gen_uai(const nl_gen_params* p, const char* out_path,
                     const char* manifest_path_or_null);

/* ---- solvers --------------------------------------------------------- */

typedef struct nl_mp_params {
    int max_iters;
    double damping;
    double rho; /* <= 0: uniform default (n-1)/|E| */
    uint64_t seed;
} nl_mp_params;

typedef struct nl_lift_params {
    int d_l;
    int layers;
    double lr;
    int max_iters;
    double tol;
    int patience;
    double t0;
    double anneal;
    int gcn_backbone; /* 0 = graphsage */
    double time_limit_s; /* <= 0: unlimited */
    uint64_t seed;
} nl_lift_params;

void nl_mp_params_default(nl_mp_params* p);
void nl_lift_params_default(nl_lift_params* p);

nl_status nl_solve_brute(const nl_instance* inst, uint64_t budget, nl_report** out);
nl_status nl_solve_lbp(const nl_instance* inst, const nl_mp_params* p, nl_report** out);
nl_status nl_solve_trbp(const nl_instance* inst, const nl_mp_params* p, nl_report** out);

/* Train the lifted model. When model_out is non-NULL the trained model is
 * retained for landscape sampling and must be freed with nl_model_free. */
nl_status nl_solve_neurolift(const nl_instance* inst, const nl_lift_params* p,
                             nl_report** out, nl_model** model_out);

void nl_report_free(nl_report* rep);
void nl_model_free(nl_model* model);

/* ---- report accessors ------------------------------------------------ */

double nl_report_best_energy(const nl_report* rep);
double nl_report_final_loss(const nl_report* rep); /* NaN if none */
long nl_report_iterations(const nl_report* rep);
uint64_t nl_report_seed(const nl_report* rep);
const char* nl_report_reason(const nl_report* rep);
int nl_report_assignment_len(const nl_report* rep);
nl_status nl_report_assignment(const nl_report* rep, int* out, int len);
long nl_report_trajectory_len(const nl_report* rep);
nl_status nl_report_trajectory_point(const nl_report* rep, long k, long* iteration,
                                     double* loss, double* best_energy,
                                     double* t_seconds);

/* ---- loss landscape -------------------------------------------------- */

/* Sample f(alpha, beta) = L(theta* + alpha d + beta e) on an n x n grid over
 * [-half_range, half_range]^2 and write alpha,beta,loss CSV rows. */
nl_status nl_landscape_csv(nl_model* model, const nl_instance* inst,
                           double half_range, int grid_n, uint64_t direction_seed,
                           const char* out_csv);

/* ---- benchmark driver ------------------------------------------------ */

typedef enum nl_solver_kind {
    NL_SOLVER_NEUROLIFT = 0,
    NL_SOLVER_LBP = 1,
    NL_SOLVER_TRBP = 2,
    NL_SOLVER_BRUTE = 3
} nl_solver_kind;

typedef struct nl_run_params {
    nl_solver_kind solver;
    const char* const* instance_paths;
    int n_instances;
    int trials;
    double time_limit_s;   /* <= 0: unlimited */
    double checkpoint_s;   /* default 200 */
    long checkpoint_iters; /* > 0: checkpoint by iteration instead */
    int jobs;
    int clamp;
    double clamp_eps;
    uint64_t brute_budget;
    uint64_t seed;
    nl_mp_params mp;
    nl_lift_params lift;
} nl_run_params;

void nl_run_params_default(nl_run_params* p);

/* Run the configured solver on every instance and write one CSV row per
 * (instance, trial, checkpoint) plus sidecar assignment files. rows_out may
 * be NULL. */
nl_status nl_run(const nl_run_params* p, const char* out_csv, long* rows_out);

#ifdef __cplusplus
}
#endif

#endif /* NEUROLIFT_H */
