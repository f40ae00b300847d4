#ifndef RWOS_H
#define RWOS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RWOS_API __declspec(dllexport)
#else
#define RWOS_API __attribute__((visibility("default")))
#endif

typedef enum rwos_status {
    RWOS_OK = 0,
    RWOS_INVALID_ARGUMENT = 1,
    RWOS_INCONSISTENT = 2,
    RWOS_NOT_CONVERGED = 3,
    RWOS_IO_ERROR = 4,
    RWOS_INTERNAL = 5
} rwos_status;

/* Holds the worker count and the message of the last failed call. Not thread safe: use one
   context per calling thread. */
typedef struct rwos_context rwos_context;
/* A walk: increments X_1..X_n and partial sums S_0..S_n. */
typedef struct rwos_walk rwos_walk;

RWOS_API const char* rwos_version(void);
RWOS_API const char* rwos_status_name(rwos_status s);

RWOS_API rwos_status rwos_context_new(rwos_context** out);
RWOS_API void rwos_context_free(rwos_context* ctx);
/* 0 means one worker per hardware thread. */
RWOS_API rwos_status rwos_context_set_threads(rwos_context* ctx, unsigned threads);
/* Message of the last non-OK status on this context; empty string if none. Owned by ctx. */
RWOS_API const char* rwos_last_error(const rwos_context* ctx);

/* Every char** output is a NUL-terminated string allocated by the library. */
RWOS_API void rwos_free_string(char* s);

/* Walks. spec: "ssrw", "gaussian:S[:M]", "laplace:B" or "mix:W*SPEC,...". */
RWOS_API rwos_status rwos_walk_simulate(rwos_context* ctx, const char* spec, size_t n, uint64_t seed, rwos_walk** out);
/* Accepts {"increments":[...]} JSON or CSV with header x; format is "json" or "csv". */
RWOS_API rwos_status rwos_walk_parse(rwos_context* ctx, const char* text, const char* format, rwos_walk** out);
RWOS_API rwos_status rwos_walk_from_increments(rwos_context* ctx, const double* x, size_t n, rwos_walk** out);
RWOS_API void rwos_walk_free(rwos_walk* w);
RWOS_API size_t rwos_walk_length(const rwos_walk* w);
/* Copies S_0..S_n into out, which must hold n + 1 doubles. */
RWOS_API rwos_status rwos_walk_sums(rwos_context* ctx, const rwos_walk* w, double* out, size_t capacity);
RWOS_API rwos_status rwos_walk_serialize(rwos_context* ctx, const rwos_walk* w, const char* format, char** out);
/* Sorted values, gaps, shifted values, min, max and last argmin as JSON. */
RWOS_API rwos_status rwos_walk_order_stats(rwos_context* ctx, const rwos_walk* w, char** out_json);

/* Feller chains. */
RWOS_API rwos_status rwos_feller_decompose(rwos_context* ctx, const rwos_walk* w, char** out_json);
/* Inverse of decompose, by reverse induction. */
RWOS_API rwos_status rwos_feller_recover(rwos_context* ctx, const char* pair_json, rwos_walk** out);
/* {"ascending":[...], "descending":[...]} segments of both chains. */
RWOS_API rwos_status rwos_feller_segments(rwos_context* ctx, const rwos_walk* w, size_t horizon, char** out_json);
RWOS_API rwos_status rwos_feller_riffle(rwos_context* ctx, const char* segments_json, rwos_walk** out);
/* Limit order statistics W_1..W_K. params: {"spec", "K", "reps", "seed", "method", "max_horizon",
   "safety"}; seed is required. */
RWOS_API rwos_status rwos_limit_order_stats(rwos_context* ctx, const char* params_json, char** out_json);

/* Exact SSRW quantities. op is one of u, ed, cheb, gf, eta-gf, enumerate, wendel, spitzer; params
   holds the op's arguments (see the CLI help). Rationals are returned as "p/q" strings. */
RWOS_API rwos_status rwos_exact_ssrw(rwos_context* ctx, const char* op, const char* params_json, char** out_json);

/* Brownian valley. op is one of h, pieces, tail, mean, mc, discretization. */
RWOS_API rwos_status rwos_valley(rwos_context* ctx, const char* op, const char* params_json, char** out_json);

/* Verification experiments. */
RWOS_API rwos_status rwos_verify_list(rwos_context* ctx, char** out_json);
/* overrides_json may be NULL. passed receives 1 if every check passed. */
RWOS_API rwos_status rwos_verify_run(rwos_context* ctx, const char* name, const char* overrides_json, uint64_t seed,
                                     char** report_json, int* passed);

#ifdef __cplusplus
}
#endif

#endif
