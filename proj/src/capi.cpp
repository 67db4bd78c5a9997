#include "mialab/capi.h"

#include <cmath>
#include <cstring>
#include <limits>

#include "mialab/hardness.hpp"
#include "mialab/runner.hpp"

namespace {

thread_local std::string g_last_error;

void copy_str(char* dst, size_t cap, const std::string& src) {
  const size_t len = std::min(src.size(), cap - 1);
  std::memcpy(dst, src.data(), len);
  dst[len] = '\0';
}

mialab_status fail(mialab_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <class Fn>
mialab_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MIALAB_OK;
  } catch (const mialab::ConfigError& e) {
    return fail(MIALAB_ERR_CONFIG, e.what());
  } catch (const mialab::FactorizationError& e) {
    return fail(MIALAB_ERR_FACTORIZATION, e.what());
  } catch (const mialab::InconsistentConstraints& e) {
    return fail(MIALAB_ERR_CONSTRAINTS, e.what());
  } catch (const mialab::InvalidArgument& e) {
    return fail(MIALAB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const mialab::Error& e) {
    return fail(MIALAB_ERR_INTERNAL, e.what());
  } catch (const std::exception& e) {
    return fail(MIALAB_ERR_INTERNAL, e.what());
  }
}

}  // namespace

struct mialab_config {
  mialab::ExperimentConfig cfg;
};

struct mialab_results {
  std::vector<mialab::ResultRow> rows;
};

extern "C" {

const char* mialab_last_error(void) { return g_last_error.c_str(); }

mialab_status mialab_config_parse(const char* text, mialab_config** out) {
  if (!text || !out) return fail(MIALAB_ERR_INVALID_ARGUMENT, "null pointer argument");
  *out = nullptr;
  return guard([&] { *out = new mialab_config{mialab::parse_config(text)}; });
}

void mialab_config_free(mialab_config* cfg) { delete cfg; }

mialab_status mialab_config_override_seed(mialab_config* cfg, uint64_t seed) {
  if (!cfg) return fail(MIALAB_ERR_INVALID_ARGUMENT, "null config");
  cfg->cfg.seed = seed;
  g_last_error.clear();
  return MIALAB_OK;
}

mialab_status mialab_config_override_threads(mialab_config* cfg, int threads) {
  if (!cfg) return fail(MIALAB_ERR_INVALID_ARGUMENT, "null config");
  if (threads < 0) return fail(MIALAB_ERR_INVALID_ARGUMENT, "threads must be >= 0");
  cfg->cfg.threads = threads;
  g_last_error.clear();
  return MIALAB_OK;
}

mialab_status mialab_run(const mialab_config* cfg, mialab_results** out) {
  if (!cfg || !out) return fail(MIALAB_ERR_INVALID_ARGUMENT, "null pointer argument");
  *out = nullptr;
  return guard([&] { *out = new mialab_results{mialab::run_experiment(cfg->cfg)}; });
}

size_t mialab_results_count(const mialab_results* res) {
  return res ? res->rows.size() : 0;
}

mialab_status mialab_results_row(const mialab_results* res, size_t index,
                                 mialab_result_row* out) {
  if (!res || !out) return fail(MIALAB_ERR_INVALID_ARGUMENT, "null pointer argument");
  if (index >= res->rows.size())
    return fail(MIALAB_ERR_INVALID_ARGUMENT, "row index out of range");
  const mialab::ResultRow& r = res->rows[index];
  copy_str(out->experiment_id, sizeof out->experiment_id, r.experiment_id);
  copy_str(out->attack, sizeof out->attack, r.attack);
  out->n = r.n;
  out->d = r.d;
  out->m = r.m;
  out->k = r.k;
  out->sigma2 = r.sigma2;
  out->rho = r.rho;
  out->trials = r.trials;
  out->tpr = r.tpr;
  out->fpr = r.fpr;
  out->advantage = r.advantage;
  out->ci_low = r.ci_low;
  out->ci_high = r.ci_high;
  out->d_star = r.d_star;
  out->tv_bound = r.tv_bound;
  out->seed = r.seed;
  out->wall_ms = r.wall_ms;
  g_last_error.clear();
  return MIALAB_OK;
}

mialab_status mialab_results_write_csv(const mialab_results* res, const char* path) {
  if (!res || !path) return fail(MIALAB_ERR_INVALID_ARGUMENT, "null pointer argument");
  const mialab_status st = guard([&] { mialab::write_csv(res->rows, path); });
  // write_csv raises the base Error type for I/O problems; reclassify.
  return st == MIALAB_ERR_INTERNAL ? MIALAB_ERR_IO : st;
}

void mialab_results_free(mialab_results* res) { delete res; }

size_t mialab_theory_suite_size(void) {
  // TC1..TC9 with TC3 evaluated at three (d, s) points.
  return 11;
}

mialab_status mialab_theory_suite(uint64_t seed, mialab_check_row* rows,
                                  size_t capacity, size_t* count) {
  if (!rows || !count) return fail(MIALAB_ERR_INVALID_ARGUMENT, "null pointer argument");
  return guard([&] {
    const auto checks = mialab::run_all_theory_checks(seed);
    if (capacity < checks.size())
      throw mialab::InvalidArgument("row buffer too small for the theory suite");
    for (size_t i = 0; i < checks.size(); ++i) {
      copy_str(rows[i].id, sizeof rows[i].id, checks[i].check_id);
      rows[i].measured = checks[i].measured;
      rows[i].predicted = checks[i].predicted;
      rows[i].tolerance = checks[i].tolerance;
      rows[i].pass = checks[i].pass ? 1 : 0;
      copy_str(rows[i].note, sizeof rows[i].note, checks[i].note);
    }
    *count = checks.size();
  });
}

size_t mialab_hardness_suite_size(void) {
  // lb-norm, three mixture-identity points, two estimator rates, one
  // reduction-advantage row.
  return 7;
}

mialab_status mialab_hardness_suite(uint64_t seed, mialab_check_row* rows,
                                    size_t capacity, size_t* count) {
  if (!rows || !count) return fail(MIALAB_ERR_INVALID_ARGUMENT, "null pointer argument");
  return guard([&] {
    const auto checks = mialab::run_hardness_suite(seed);
    if (capacity < checks.size())
      throw mialab::InvalidArgument("row buffer too small for the hardness suite");
    for (size_t i = 0; i < checks.size(); ++i) {
      copy_str(rows[i].id, sizeof rows[i].id, checks[i].name);
      rows[i].measured = checks[i].measured;
      rows[i].predicted = checks[i].threshold;
      rows[i].tolerance = 0.0;
      rows[i].pass = checks[i].pass ? 1 : 0;
      copy_str(rows[i].note, sizeof rows[i].note, checks[i].note);
    }
    *count = checks.size();
  });
}

mialab_status mialab_bounds(int n, int m, int d, double rho,
                            mialab_bound_values* out) {
  if (!out) return fail(MIALAB_ERR_INVALID_ARGUMENT, "null pointer argument");
  return guard([&] {
    out->d_star = mialab::d_star(n, rho);
    out->informed_tv = mialab::informed_tv_bound(n, d, rho);
    if (n >= 4 && m >= 2) {
      const mialab::BoundReport rep = mialab::known_cov_bounds(n, m, d, rho);
      out->known_cov_tv = rep.tv_bound;
      out->kl_exact = rep.kl_exact.value_or(std::numeric_limits<double>::quiet_NaN());
    } else {
      out->known_cov_tv = std::numeric_limits<double>::quiet_NaN();
      out->kl_exact = std::numeric_limits<double>::quiet_NaN();
    }
  });
}

}  // extern "C"
