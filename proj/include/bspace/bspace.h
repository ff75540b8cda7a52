#ifndef BSPACE_BSPACE_H
#define BSPACE_BSPACE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define BSPACE_API __attribute__((visibility("default")))
#else
#define BSPACE_API
#endif

typedef enum {
  BSPACE_OK = 0,
  BSPACE_ERR_INVALID = 1,     /* bad argument or malformed input */
  BSPACE_ERR_RANGE = 2,       /* node outside the truncation */
  BSPACE_ERR_INFEASIBLE = 3,  /* request cannot be met at this size */
  BSPACE_ERR_INTERNAL = 4
} bspace_status;

typedef struct bspace_tree bspace_tree;
typedef struct bspace_vec bspace_vec;
typedef struct bspace_params bspace_params;

/* Message for the last failing call on this thread; never NULL. */
BSPACE_API const char* bspace_last_error(void);
/* Infeasible calls that know how far to grow (n_max, list length) report it here; 0 otherwise. */
BSPACE_API uint64_t bspace_last_required(void);
BSPACE_API const char* bspace_version(void);
/* Frees strings handed out through char** results. */
BSPACE_API void bspace_string_free(char* s);

BSPACE_API bspace_status bspace_tree_build(unsigned xi, uint64_t n_max, bspace_tree** out);
BSPACE_API bspace_status bspace_tree_from_json(const char* json, bspace_tree** out);
BSPACE_API bspace_status bspace_tree_to_json(const bspace_tree* tree, char** out);
BSPACE_API bspace_status bspace_tree_precedes(const bspace_tree* tree, uint64_t a, uint64_t b, int* out);
BSPACE_API uint64_t bspace_tree_n_max(const bspace_tree* tree);
BSPACE_API void bspace_tree_free(bspace_tree* tree);

/* {"coords": [[node, "p/q"], ...]} */
BSPACE_API bspace_status bspace_vec_from_json(const char* json, bspace_vec** out);
BSPACE_API bspace_status bspace_vec_to_json(const bspace_vec* vec, char** out);
BSPACE_API void bspace_vec_free(bspace_vec* vec);

/* {"m": [...], "n": [...], "toy": bool}; toy != 0 forces the toy flag. json == NULL gives the toy defaults. */
BSPACE_API bspace_status bspace_params_from_json(const char* json, int toy, bspace_params** out);
BSPACE_API bspace_status bspace_params_to_json(const bspace_params* params, char** out);
BSPACE_API void bspace_params_free(bspace_params* params);

/*
 * space: "tinc", "essinc", "jt", "ground" or "wg".
 * ground: ground set for "ground"/"wg": "G0", "G1", "G2", "Gp", "Gsum" (NULL = G2).
 * r, p: rationals "p/q"; p == NULL means infinity for "jt", q of Gp otherwise.
 * tree may be NULL only for "essinc" and for G0; params is needed for "essinc".
 */
BSPACE_API bspace_status bspace_norm(const char* space, const char* ground, const bspace_vec* x, const bspace_tree* tree,
                                     const bspace_params* params, const char* r, const char* p, char** out_json);

/* Repeated average of the given order along {start, start+1, ...}; *pass tells whether it meets eps. */
BSPACE_API bspace_status bspace_scc(unsigned order, const char* eps, uint64_t start, int* pass, char** out_json);

/* m_set: JSON array of increasing naturals. At most `limit` families are listed. */
BSPACE_API bspace_status bspace_plegma(size_t l, size_t k, const char* m_set, int strict, size_t limit,
                                       char** out_json);
BSPACE_API bspace_status bspace_plegma_check(const char* family_json, int strict, int* out);

/* p == NULL plays on T_inc, otherwise on JT with that p. claimed_c may be NULL. */
BSPACE_API bspace_status bspace_game(unsigned n, const char* p, const char* claimed_c, const bspace_tree* tree,
                                     char** out_json);

BSPACE_API bspace_status bspace_experiment_names(char** out_json);
/* format: "json" or "csv". *pass is 1 iff every claim passed. */
BSPACE_API bspace_status bspace_experiment(const char* name, const char* params_json, const char* format,
                                           int with_runtime, int* pass, char** out);

#ifdef __cplusplus
}
#endif

#endif
