// mia: experiment runner and check-suite front end over the C API.
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mialab/capi.h"

namespace {

int die(const std::string& context) {
  std::fprintf(stderr, "error: %s: %s\n", context.c_str(), mialab_last_error());
  return 1;
}

int print_checks(const std::vector<mialab_check_row>& rows, size_t count) {
  bool all_pass = true;
  for (size_t i = 0; i < count; ++i) {
    const mialab_check_row& r = rows[i];
    std::printf("%-32s measured=%.6g expected=%.6g tol=%.3g %s  %s\n", r.id,
                r.measured, r.predicted, r.tolerance, r.pass ? "PASS" : "FAIL",
                r.note);
    if (!r.pass) all_pass = false;
  }
  std::printf("%s\n", all_pass ? "all checks passed" : "some checks FAILED");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"membership-inference simulation lab"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run an experiment config, emit CSV");
  std::string config_path, out_path;
  std::uint64_t seed_override = 0;
  int threads_override = -1;
  bool have_seed = false;
  run->add_option("--config", config_path, "config file path")->required();
  run->add_option("--out", out_path, "output CSV path")->required();
  run->add_option("--seed", seed_override, "override the config seed")
      ->each([&](const std::string&) { have_seed = true; });
  run->add_option("--threads", threads_override, "override the config thread count");

  // theory
  auto* theory = app.add_subcommand("theory", "run the closed-form check table");
  std::uint64_t theory_seed = 1;
  theory->add_option("--seed", theory_seed, "suite seed");

  // hardness
  auto* hardness = app.add_subcommand("hardness", "run the covariance-testing suite");
  std::uint64_t hardness_seed = 1;
  hardness->add_option("--seed", hardness_seed, "suite seed");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "print closed-form bounds");
  int bn = 30, bm = 0, bd = 100;
  double brho = 0.0;
  bounds->add_option("--n", bn, "dataset size");
  bounds->add_option("--m", bm, "auxiliary sample count");
  bounds->add_option("--d", bd, "dimension");
  bounds->add_option("--rho", brho, "noise scale");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::fprintf(stderr, "error: cannot read config '%s'\n", config_path.c_str());
      return 1;
    }
    std::ostringstream text;
    text << in.rdbuf();

    mialab_config* cfg = nullptr;
    if (mialab_config_parse(text.str().c_str(), &cfg) != MIALAB_OK)
      return die("parsing " + config_path);
    if (have_seed && mialab_config_override_seed(cfg, seed_override) != MIALAB_OK) {
      mialab_config_free(cfg);
      return die("overriding seed");
    }
    if (threads_override >= 0 &&
        mialab_config_override_threads(cfg, threads_override) != MIALAB_OK) {
      mialab_config_free(cfg);
      return die("overriding threads");
    }

    mialab_results* res = nullptr;
    const mialab_status st = mialab_run(cfg, &res);
    mialab_config_free(cfg);
    if (st != MIALAB_OK) return die("running " + config_path);
    if (mialab_results_write_csv(res, out_path.c_str()) != MIALAB_OK) {
      mialab_results_free(res);
      return die("writing " + out_path);
    }
    std::printf("wrote %zu row(s) to %s\n", mialab_results_count(res),
                out_path.c_str());
    mialab_results_free(res);
    return 0;
  }

  if (*theory) {
    std::vector<mialab_check_row> rows(mialab_theory_suite_size());
    size_t count = 0;
    if (mialab_theory_suite(theory_seed, rows.data(), rows.size(), &count) !=
        MIALAB_OK)
      return die("theory suite");
    return print_checks(rows, count);
  }

  if (*hardness) {
    std::vector<mialab_check_row> rows(mialab_hardness_suite_size());
    size_t count = 0;
    if (mialab_hardness_suite(hardness_seed, rows.data(), rows.size(), &count) !=
        MIALAB_OK)
      return die("hardness suite");
    return print_checks(rows, count);
  }

  if (*bounds) {
    mialab_bound_values v{};
    if (mialab_bounds(bn, bm, bd, brho, &v) != MIALAB_OK) return die("bounds");
    std::printf("d_star = %.17g\n", v.d_star);
    std::printf("informed_tv_bound = %.17g\n", v.informed_tv);
    std::printf("known_cov_tv_bound = %.17g\n", v.known_cov_tv);
    std::printf("known_cov_kl_exact = %.17g\n", v.kl_exact);
    return 0;
  }

  return 0;
}
