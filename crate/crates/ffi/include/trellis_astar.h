#ifndef TRELLIS_ASTAR_H
#define TRELLIS_ASTAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TA_COST_HCC 0

#define TA_COST_DASGUPTA 1

#define TA_COST_GINKGO 2

/*
 The cost's own admissible heuristic (h1 for ginkgo).
 */
#define TA_HEURISTIC_DEFAULT 0

#define TA_HEURISTIC_ZERO 1

#define TA_HEURISTIC_HCC 2

#define TA_HEURISTIC_DASGUPTA 3

#define TA_HEURISTIC_H0 4

#define TA_HEURISTIC_H1 5

#define TA_SAMPLER_BEST_K 0

#define TA_SAMPLER_IMPORTANCE 1

/*
 Status codes. Codes 3 to 10 match the command-line exit codes.
 */
typedef enum TaStatus {
  TA_STATUS_OK = 0,
  TA_STATUS_NULL_ARGUMENT = 1,
  TA_STATUS_INVALID_UTF8 = 2,
  TA_STATUS_PARSE = 3,
  TA_STATUS_IO = 4,
  TA_STATUS_CAPACITY = 5,
  TA_STATUS_DOMAIN = 6,
  TA_STATUS_OBJECTIVE_MISMATCH = 7,
  TA_STATUS_SEARCH_EXHAUSTED = 8,
  TA_STATUS_ITERATION_CAP = 9,
  TA_STATUS_MISSING_NODE = 10,
  TA_STATUS_PANIC = 11,
} TaStatus;

/*
 A dataset: a similarity graph or a jet.
 */
typedef struct TaInstance TaInstance;

/*
 A hierarchy with its cost and search counters.
 */
typedef struct TaResult TaResult;

/*
 Options for [`ta_approx`]; start from [`ta_approx_options_default`].
 */
typedef struct TaApproxOptions {
  uint64_t seed;
  uint32_t rounds;
  uint32_t pool;
  uint32_t top_k;
  /*
   `TA_SAMPLER_BEST_K` or `TA_SAMPLER_IMPORTANCE`.
   */
  uint32_t sampler;
  /*
   0 selects the default width.
   */
  uint32_t beam_width;
} TaApproxOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or NULL. Valid until
 the next failing call on this thread.
 */
const char *ta_last_error_message(void);

/*
 Parses a jet: `{"lambda", "t_cut", "leaves": [[E, px, py, pz], ...]}`.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TaStatus ta_instance_from_jet_json(const char *json, struct TaInstance **out);

/*
 Parses a graph: first line `n m`, then `m` lines `i j w`.

 # Safety
 `text` must be a NUL-terminated string; `out` must be writable.
 */
enum TaStatus ta_instance_from_graph_text(const char *text, struct TaInstance **out);

/*
 Builds a mean-centered cosine-similarity graph from a row-major
 `rows × cols` matrix of feature vectors.

 # Safety
 `data` must point to `rows * cols` readable doubles; `out` must be writable.
 */
enum TaStatus ta_instance_from_points(const double *data,
                                      size_t rows,
                                      size_t cols,
                                      struct TaInstance **out);

/*
 Number of elements, or 0 for NULL.

 # Safety
 `instance` must be NULL or a live handle.
 */
size_t ta_instance_size(const struct TaInstance *instance);

/*
 # Safety
 `instance` must be NULL or a handle not yet freed.
 */
void ta_instance_free(struct TaInstance *instance);

/*
 Optimal hierarchy by A* on the full trellis.

 # Safety
 `instance` must be a live handle; `out` must be writable.
 */
enum TaStatus ta_exact(const struct TaInstance *instance,
                       uint32_t cost,
                       uint32_t heuristic,
                       struct TaResult **out);

struct TaApproxOptions ta_approx_options_default(void);

/*
 Beam-seeded sparse-trellis A*. `options` may be NULL for defaults.

 # Safety
 `instance` must be a live handle; `options` NULL or readable; `out` writable.
 */
enum TaStatus ta_approx(const struct TaInstance *instance,
                        uint32_t cost,
                        uint32_t heuristic,
                        const struct TaApproxOptions *options,
                        struct TaResult **out);

/*
 Greedy agglomeration.

 # Safety
 `instance` must be a live handle; `out` must be writable.
 */
enum TaStatus ta_greedy(const struct TaInstance *instance, uint32_t cost, struct TaResult **out);

/*
 Beam search; `width` 0 selects the default width.

 # Safety
 `instance` must be a live handle; `out` must be writable.
 */
enum TaStatus ta_beam(const struct TaInstance *instance,
                      uint32_t cost,
                      uint32_t width,
                      struct TaResult **out);

/*
 Cost of the hierarchy; NaN for NULL.

 # Safety
 `result` must be NULL or a live handle.
 */
double ta_result_cost(const struct TaResult *result);

/*
 Trellis nodes explored (beam states for beam search, 0 for greedy).

 # Safety
 `result` must be NULL or a live handle.
 */
uint64_t ta_result_nodes_explored(const struct TaResult *result);

/*
 The tree as `{"members": [...], "children": [...]}` JSON, or NULL for a
 NULL handle. Free with [`ta_string_free`].

 # Safety
 `result` must be NULL or a live handle.
 */
char *ta_result_tree_json(const struct TaResult *result);

/*
 # Safety
 `result` must be NULL or a handle not yet freed.
 */
void ta_result_free(struct TaResult *result);

/*
 # Safety
 `s` must be NULL or a string returned by this library and not yet freed.
 */
void ta_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRELLIS_ASTAR_H */
