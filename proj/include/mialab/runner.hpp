#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mialab/analysis.hpp"

namespace mialab {

// Flat key = value experiment description. Defaults are applied by
// parse_config; seed has no default so every run states one.
struct ExperimentConfig {
  std::string experiment = "game";  // game | spiked-game | sweep | hardness | theory | bounds
  int n = 10;
  int d = 10;
  int m = 0;
  int k = 1;
  double rho = 0.0;
  double sigma2 = 1.0;
  std::string attack = "informed-np";
  std::string threshold_mode = "fixed-c";  // fixed-c | calibrated
  double c = 0.5;
  double fpr_target = 0.45;
  int trials = 1000;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = available cores
  std::string sweep_param;           // one of n, d, m, k, rho, sigma2 (optional)
  std::vector<double> sweep_values;  // comma-separated in the config
};

struct ResultRow {
  std::string experiment_id;
  std::string attack;
  int n = 0;
  int d = 0;
  int m = 0;
  int k = 0;
  double sigma2 = 0.0;
  double rho = 0.0;
  int trials = 0;
  double tpr = 0.0;
  double fpr = 0.0;
  double advantage = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double d_star = 0.0;
  double tv_bound = 0.0;
  std::uint64_t seed = 0;
  long long wall_ms = 0;
};

// Parses line-oriented `key = value` text; `#` starts a comment. Unknown
// keys, malformed values, and a missing seed are ConfigError, naming the
// offending line.
ExperimentConfig parse_config(const std::string& text);

// Inverse of parse_config: parse(render(cfg)) == cfg.
std::string render_config(const ExperimentConfig& cfg);

// Evaluates the configured attack at every sweep point. Deterministic for a
// fixed (config, seed) regardless of thread count; wall_ms excluded.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// UTF-8, comma-separated, LF endings, header in ResultRow field order,
// doubles at 17 significant digits.
void write_csv(const std::vector<ResultRow>& rows, const std::string& path);

// The CSV text write_csv emits (exposed for determinism tests).
std::string render_csv(const std::vector<ResultRow>& rows);

}  // namespace mialab
