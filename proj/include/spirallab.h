/* spiral-lab C API.
 *
 * A shared-library surface over the simulation core: finite metric spaces
 * with Gromov-Hausdorff comparisons, spiral reference nets, increment
 * generator diagnostics, VC-family queries and the experiment runner.
 *
 * Conventions:
 *   - Every fallible call returns a spirallab_status; SPIRALLAB_OK is 0.
 *   - On failure, spirallab_last_error() returns a thread-local message
 *     that stays valid until the next failing call on the same thread.
 *   - Objects are opaque handles released with their *_free function.
 *   - Strings returned through char** are heap-allocated; release them
 *     with spirallab_string_free.
 *   - Structured inputs (measures, experiment configs, VC requests) are
 *     JSON strings; the schemas are documented in the project README and
 *     docs/.
 */

#ifndef SPIRALLAB_H
#define SPIRALLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spirallab_status {
  SPIRALLAB_OK = 0,
  SPIRALLAB_ERR_INVALID_ARGUMENT = 1, /* bad value, failed validation */
  SPIRALLAB_ERR_DOMAIN = 2,           /* precondition violated (e.g. gh_exact cap) */
  SPIRALLAB_ERR_PARSE = 3,            /* malformed file or JSON */
  SPIRALLAB_ERR_IO = 4,               /* filesystem failure */
  SPIRALLAB_ERR_INTERNAL = 5
} spirallab_status;

typedef struct spirallab_fms spirallab_fms;       /* finite metric space */
typedef struct spirallab_report spirallab_report; /* experiment report */

const char* spirallab_version(void);
const char* spirallab_last_error(void);
void spirallab_string_free(char* s);

/* --- finite metric spaces ------------------------------------------- */

/* Euclidean metric space of `count` points of dimension `dim`, row-major. */
spirallab_status spirallab_fms_from_points(int count, int dim, const double* points,
                                           spirallab_fms** out);

/* Distance-matrix CSV with header "# fms v1, size=<n>"; reading validates
 * symmetry, zero diagonal and the triangle inequality. */
spirallab_status spirallab_fms_read_csv(const char* path, spirallab_fms** out);
spirallab_status spirallab_fms_write_csv(const spirallab_fms* fms, const char* path);

int spirallab_fms_size(const spirallab_fms* fms);
spirallab_status spirallab_fms_distance(const spirallab_fms* fms, int i, int j, double* out);
void spirallab_fms_free(spirallab_fms* fms);

/* Exact Gromov-Hausdorff distance by exhaustive correspondence search;
 * requires size(a) * size(b) <= 25 (SPIRALLAB_ERR_DOMAIN otherwise). */
spirallab_status spirallab_gh_exact(const spirallab_fms* a, const spirallab_fms* b, double* out);

/* Upper bound: half the distortion of the canonical index-proportional
 * correspondence. Works at any size. */
spirallab_status spirallab_gh_canonical_bound(const spirallab_fms* a, const spirallab_fms* b,
                                              double* out);

/* --- spiral reference nets ------------------------------------------ */

/* Metric space of the lattice net {rect(k/n) : k in {0..n}^m} under the
 * measure given as JSON: {"kind":"lebesgue","p":m} |
 * {"kind":"dirac","x":[...]} | {"kind":"discrete","points":[[...]],
 * "weights":[...]}. Pass NULL for Lebesgue. */
spirallab_status spirallab_spiral_net_lattice(int m, int n, const char* measure_json,
                                              spirallab_fms** out);

/* --- increment generators ------------------------------------------- */

/* Empirical moment-condition report for a generator
 * ("sphere"|"gauss"|"rademacher"|"coord"|"aniso:<theta>") in dimension d;
 * at least 1000 replicates. Returns a JSON report. */
spirallab_status spirallab_validate_generator(const char* generator, int d, int replicates,
                                              uint64_t seed, char** json_out);

/* --- VC families ------------------------------------------------------ */

/* JSON request/response for VC-family queries (traces, shatters, dim,
 * cover, bracket); see README for the request schema. */
spirallab_status spirallab_vc_query(const char* request_json, char** json_out);

/* --- experiments ------------------------------------------------------ */

/* Runs a d-sweep experiment from a JSON config (see README; the `ms-run`
 * and `si-run` CLI subcommands build these configs from flags). The result
 * is bit-identical for identical configs at any thread count. */
spirallab_status spirallab_experiment_run(const char* config_json, spirallab_report** out);

spirallab_status spirallab_report_write_csv(const spirallab_report* report, const char* path);
spirallab_status spirallab_report_write_json(const spirallab_report* report, const char* path);
spirallab_status spirallab_report_to_json(const spirallab_report* report, char** json_out);
void spirallab_report_free(spirallab_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SPIRALLAB_H */
