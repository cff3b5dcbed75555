/* masskit C API: missing/total probability mass estimation toolkit.
 *
 * All functions return a masskit_status code; out-parameters are written only
 * on MASSKIT_OK. Handles are opaque and must be released with the matching
 * _free call. unseen-detail messages for the last failure on the calling
 * thread are available via masskit_last_error().
 */

#ifndef MASSKIT_H
#define MASSKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MASSKIT_API __declspec(dllexport)
#else
#define MASSKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum masskit_status {
  MASSKIT_OK = 0,
  MASSKIT_ERR_DOMAIN = 1,   /* precondition violated */
  MASSKIT_ERR_IO = 2,       /* file missing/unreadable/unwritable */
  MASSKIT_ERR_SPEC = 3,     /* malformed experiment spec */
  MASSKIT_ERR_BUDGET = 4,   /* enumeration budget exceeded */
  MASSKIT_ERR_INTERNAL = 5
} masskit_status;

typedef struct masskit_dist masskit_dist;
typedef struct masskit_profile masskit_profile;
typedef struct masskit_rep masskit_rep;

MASSKIT_API const char* masskit_last_error(void);
MASSKIT_API void masskit_string_free(char* s);

/* Distributions: kind is one of "uniform", "half-and-half", "zipf",
 * "dirichlet-prior"; param is the zipf exponent or Dirichlet concentration
 * (ignored otherwise); the seed only matters for dirichlet-prior. */
MASSKIT_API masskit_status masskit_dist_create(const char* kind, long support,
                                               double param, uint64_t seed,
                                               masskit_dist** out);
MASSKIT_API void masskit_dist_free(masskit_dist* dist);
MASSKIT_API masskit_status masskit_dist_probability(const masskit_dist* dist,
                                                    long klass, double* out);

/* Samples and frequency profiles. */
MASSKIT_API masskit_status masskit_sample(const masskit_dist* dist, long n,
                                          uint64_t seed, masskit_profile** out);
MASSKIT_API masskit_status masskit_profile_read_tokens(const char* path,
                                                       masskit_profile** out);
MASSKIT_API masskit_status masskit_profile_read_counts(const char* path,
                                                       masskit_profile** out);
MASSKIT_API masskit_status masskit_profile_write_tokens(const masskit_profile* p,
                                                        const char* path);
MASSKIT_API long masskit_profile_size(const masskit_profile* p);
MASSKIT_API long masskit_profile_phi(const masskit_profile* p, long k);
MASSKIT_API int masskit_profile_has_prefixes(const masskit_profile* p);
MASSKIT_API void masskit_profile_free(masskit_profile* p);

/* Point estimators on a profile. */
MASSKIT_API masskit_status masskit_good_turing(const masskit_profile* p, long k,
                                               int simple_variant, double* out);
MASSKIT_API masskit_status masskit_minimal_bias(const masskit_profile* p, long k,
                                                double* out);
MASSKIT_API masskit_status masskit_chao_unseen(const masskit_profile* p,
                                               double* out);
/* JSON object with every estimator (raw and [0,1]-clamped variants). */
MASSKIT_API masskit_status masskit_estimate_json(const masskit_profile* p, long k,
                                                 char** json_out);

/* Representations (text format: header "n k", then "i j coefficient"). */
MASSKIT_API masskit_status masskit_rep_read(const char* path, masskit_rep** out);
MASSKIT_API masskit_status masskit_rep_write(const masskit_rep* rep,
                                             const char* path);
MASSKIT_API masskit_status masskit_rep_validate(const masskit_rep* rep,
                                                int* valid_out, char** report_out);
MASSKIT_API masskit_status masskit_rep_adapt(const masskit_rep* rep, long m,
                                             masskit_rep** out);
MASSKIT_API masskit_status masskit_rep_evaluate(const masskit_rep* rep,
                                                const masskit_profile* p,
                                                double* out);
MASSKIT_API void masskit_rep_free(masskit_rep* rep);

/* Genetic search. config_json may be NULL for defaults; recognized keys
 * mirror the experiment spec's "ga" object plus "seed". On success *best
 * holds the evolved representation and *manifest_json the run manifest. */
MASSKIT_API masskit_status masskit_evolve(const masskit_profile* p, long k,
                                          const char* config_json,
                                          masskit_rep** best,
                                          char** manifest_json);

/* Experiment runner: reads a JSON spec, writes results.csv (plus
 * bias_curve.dat for bias-curve mode) into out_dir. workers <= 0 keeps the
 * spec's value; mode_override (nullable) replaces the spec's mode. */
MASSKIT_API masskit_status masskit_experiment_run(const char* spec_path,
                                                  const char* out_dir,
                                                  int workers,
                                                  const char* mode_override);

/* Oracle audit: exact enumeration cross-checks; *failures_out is the number
 * of mismatches (0 = all exact), *report_json a summary. */
MASSKIT_API masskit_status masskit_audit_run(long max_support, long max_n,
                                             long* failures_out,
                                             char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* MASSKIT_H */
