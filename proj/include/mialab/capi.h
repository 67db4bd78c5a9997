/* C interface of the mialab shared library. Every entry point returns a
 * status code; mialab_last_error() holds the message of the most recent
 * failure on the calling thread. */
#ifndef MIALAB_CAPI_H
#define MIALAB_CAPI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mialab_status {
  MIALAB_OK = 0,
  MIALAB_ERR_INVALID_ARGUMENT = 1,
  MIALAB_ERR_FACTORIZATION = 2,
  MIALAB_ERR_CONSTRAINTS = 3,
  MIALAB_ERR_CONFIG = 4,
  MIALAB_ERR_IO = 5,
  MIALAB_ERR_INTERNAL = 6
} mialab_status;

/* Message of the last failing call on this thread; empty string if none. */
const char* mialab_last_error(void);

/* --- experiment configs and runs ----------------------------------------- */

typedef struct mialab_config mialab_config;
typedef struct mialab_results mialab_results;

mialab_status mialab_config_parse(const char* text, mialab_config** out);
void mialab_config_free(mialab_config* cfg);
mialab_status mialab_config_override_seed(mialab_config* cfg, uint64_t seed);
mialab_status mialab_config_override_threads(mialab_config* cfg, int threads);

mialab_status mialab_run(const mialab_config* cfg, mialab_results** out);

typedef struct mialab_result_row {
  char experiment_id[64];
  char attack[32];
  int n, d, m, k;
  double sigma2, rho;
  int trials;
  double tpr, fpr, advantage, ci_low, ci_high;
  double d_star, tv_bound;
  uint64_t seed;
  long long wall_ms;
} mialab_result_row;

size_t mialab_results_count(const mialab_results* res);
mialab_status mialab_results_row(const mialab_results* res, size_t index,
                                 mialab_result_row* out);
mialab_status mialab_results_write_csv(const mialab_results* res, const char* path);
void mialab_results_free(mialab_results* res);

/* --- check suites --------------------------------------------------------- */

typedef struct mialab_check_row {
  char id[32];
  double measured;
  double predicted; /* threshold for hardness checks */
  double tolerance; /* 0 for hardness checks */
  int pass;
  char note[160];
} mialab_check_row;

size_t mialab_theory_suite_size(void);
mialab_status mialab_theory_suite(uint64_t seed, mialab_check_row* rows,
                                  size_t capacity, size_t* count);

size_t mialab_hardness_suite_size(void);
mialab_status mialab_hardness_suite(uint64_t seed, mialab_check_row* rows,
                                    size_t capacity, size_t* count);

/* --- closed-form bounds --------------------------------------------------- */

typedef struct mialab_bound_values {
  double d_star;
  double informed_tv;
  double known_cov_tv; /* NaN when n < 4 or m < 2 */
  double kl_exact;     /* NaN when n < 4 or m < 2 */
} mialab_bound_values;

mialab_status mialab_bounds(int n, int m, int d, double rho,
                            mialab_bound_values* out);

#ifdef __cplusplus
}
#endif

#endif /* MIALAB_CAPI_H */
