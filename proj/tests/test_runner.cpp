#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "mialab/capi.h"
#include "mialab/runner.hpp"

using namespace mialab;

namespace {

// CSV text with the wall_ms column (the last field) blanked out, for
// determinism comparisons.
std::string strip_wall_ms(const std::string& csv) {
  std::string out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    out += line.substr(0, pos);
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("parse_config: defaults and provided values") {
  const ExperimentConfig cfg = parse_config(
      "experiment = game\nn = 30\nd = 300\nm = 0\nrho = 0.3\n"
      "attack = informed-np\nseed = 7\n");
  CHECK(cfg.experiment == "game");
  CHECK(cfg.n == 30);
  CHECK(cfg.d == 300);
  CHECK(cfg.rho == 0.3);
  CHECK(cfg.seed == 7);
  // Documented defaults.
  CHECK(cfg.trials == 1000);
  CHECK(cfg.threshold_mode == "fixed-c");
  CHECK(cfg.c == 0.5);
  CHECK(cfg.fpr_target == 0.45);
}

TEST_CASE("parse_config: error messages name the line") {
  try {
    parse_config("banana = 1");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "unknown key 'banana' (line 1)");
  }

  CHECK_THROWS_AS(parse_config("n = 5\n"), ConfigError);  // missing seed
  try {
    parse_config("seed = 1\n\nn = chips\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'n'") != std::string::npos);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("parse_config: comments and render round-trip") {
  ExperimentConfig cfg = parse_config(
      "# full sweep\nexperiment = sweep\nn = 12\nd = 20\nrho = 0.25 # noise\n"
      "attack = known-cov\nm = 8\nseed = 99\nsweep_param = d\n"
      "sweep_values = 10, 20, 40\n");
  const ExperimentConfig back = parse_config(render_config(cfg));
  CHECK(back.experiment == cfg.experiment);
  CHECK(back.n == cfg.n);
  CHECK(back.d == cfg.d);
  CHECK(back.m == cfg.m);
  CHECK(back.k == cfg.k);
  CHECK(back.rho == cfg.rho);
  CHECK(back.sigma2 == cfg.sigma2);
  CHECK(back.attack == cfg.attack);
  CHECK(back.threshold_mode == cfg.threshold_mode);
  CHECK(back.c == cfg.c);
  CHECK(back.fpr_target == cfg.fpr_target);
  CHECK(back.trials == cfg.trials);
  CHECK(back.seed == cfg.seed);
  CHECK(back.threads == cfg.threads);
  CHECK(back.sweep_param == cfg.sweep_param);
  CHECK(back.sweep_values == cfg.sweep_values);
}

TEST_CASE("run_experiment: always-in gives advantage zero") {
  ExperimentConfig cfg = parse_config(
      "experiment = game\nn = 5\nd = 6\nattack = always-in\ntrials = 40\nseed = 3\n");
  const auto rows = run_experiment(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].tpr == 1.0);
  CHECK(rows[0].fpr == 1.0);
  CHECK(rows[0].advantage == 0.0);
  CHECK(rows[0].d_star == d_star(5, 0.0));
  CHECK(rows[0].tv_bound == informed_tv_bound(5, 6, 0.0));
}

TEST_CASE("run_experiment: identical config gives identical rows") {
  ExperimentConfig cfg = parse_config(
      "experiment = game\nn = 8\nd = 10\nrho = 0.2\nattack = informed-np\n"
      "trials = 100\nseed = 11\n");
  const std::string a = strip_wall_ms(render_csv(run_experiment(cfg)));
  const std::string b = strip_wall_ms(render_csv(run_experiment(cfg)));
  CHECK(a == b);
}

TEST_CASE("run_experiment: determinism across thread counts") {
  const std::string base =
      "experiment = sweep\nn = 10\nd = 8\nrho = 0.2\nattack = informed-np\n"
      "threshold_mode = calibrated\ntrials = 60\nseed = 17\n"
      "sweep_param = d\nsweep_values = 4, 8\n";
  ExperimentConfig c1 = parse_config(base + "threads = 1\n");
  ExperimentConfig c8 = parse_config(base + "threads = 8\n");
  CHECK(strip_wall_ms(render_csv(run_experiment(c1))) ==
        strip_wall_ms(render_csv(run_experiment(c8))));
}

TEST_CASE("run_experiment: informed advantage nondecreasing in d") {
  ExperimentConfig cfg = parse_config(
      "experiment = sweep\nn = 30\nrho = 0.3\nattack = informed-np\n"
      "trials = 1000\nseed = 23\nsweep_param = d\n"
      "sweep_values = 50, 100, 200, 400, 800\n");
  const auto rows = run_experiment(cfg);
  REQUIRE(rows.size() == 5);
  const double slack = 3.0 * std::sqrt(1.0 / 1000.0);
  for (size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].advantage >= rows[i - 1].advantage - slack);
}

TEST_CASE("render_csv: header, row counts, numeric round-trip") {
  CHECK(render_csv({}) ==
        "experiment_id,attack,n,d,m,k,sigma2,rho,trials,tpr,fpr,advantage,"
        "ci_low,ci_high,d_star,tv_bound,seed,wall_ms\n");

  ResultRow row;
  row.experiment_id = "game";
  row.attack = "informed-np";
  row.n = 30;
  row.d = 12;
  row.m = 0;
  row.k = 1;
  row.sigma2 = 1.0;
  row.rho = 0.1 + 0.2;  // deliberately non-representable
  row.trials = 100;
  row.tpr = 2.0 / 3.0;
  row.fpr = 1.0 / 7.0;
  row.advantage = row.tpr - row.fpr;
  row.ci_low = -0.01;
  row.ci_high = 0.99;
  row.d_star = d_star(30, row.rho);
  row.tv_bound = informed_tv_bound(30, 12, row.rho);
  row.seed = 12345;
  row.wall_ms = 9;
  const std::string csv = render_csv({row});
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

  // 17 significant digits round-trip doubles exactly.
  std::istringstream in(csv);
  std::string header, line, tok;
  std::getline(in, header);
  std::getline(in, line);
  std::istringstream fields(line);
  std::vector<std::string> cols;
  while (std::getline(fields, tok, ',')) cols.push_back(tok);
  REQUIRE(cols.size() == 18);
  CHECK(std::strtod(cols[7].c_str(), nullptr) == row.rho);
  CHECK(std::strtod(cols[9].c_str(), nullptr) == row.tpr);
  CHECK(std::strtod(cols[10].c_str(), nullptr) == row.fpr);
  CHECK(std::strtod(cols[11].c_str(), nullptr) == row.advantage);
  CHECK(std::strtod(cols[15].c_str(), nullptr) == row.tv_bound);
}

TEST_CASE("C API: config, run, rows, error reporting") {
  mialab_config* cfg = nullptr;
  REQUIRE(mialab_config_parse(
              "experiment = game\nn = 5\nd = 6\nattack = always-in\n"
              "trials = 20\nseed = 4\n",
              &cfg) == MIALAB_OK);
  REQUIRE(mialab_config_override_seed(cfg, 9) == MIALAB_OK);
  REQUIRE(mialab_config_override_threads(cfg, 2) == MIALAB_OK);

  mialab_results* res = nullptr;
  REQUIRE(mialab_run(cfg, &res) == MIALAB_OK);
  REQUIRE(mialab_results_count(res) == 1);
  mialab_result_row row;
  REQUIRE(mialab_results_row(res, 0, &row) == MIALAB_OK);
  CHECK(std::string(row.attack) == "always-in");
  CHECK(row.advantage == 0.0);
  CHECK(row.seed == 9);
  CHECK(mialab_results_row(res, 1, &row) == MIALAB_ERR_INVALID_ARGUMENT);
  mialab_results_free(res);
  mialab_config_free(cfg);

  mialab_config* bad = nullptr;
  CHECK(mialab_config_parse("banana = 1", &bad) == MIALAB_ERR_CONFIG);
  CHECK(std::string(mialab_last_error()) == "unknown key 'banana' (line 1)");
}

TEST_CASE("C API: bounds values and NaN domain") {
  mialab_bound_values v{};
  REQUIRE(mialab_bounds(100, 9, 105, 0.0, &v) == MIALAB_OK);
  CHECK(v.d_star == 100.0);
  CHECK(v.known_cov_tv == doctest::Approx(std::sqrt(105.0 / 262.5)).epsilon(1e-12));

  REQUIRE(mialab_bounds(3, 9, 10, 0.0, &v) == MIALAB_OK);
  CHECK(std::isnan(v.known_cov_tv));
  CHECK(std::isnan(v.kl_exact));
  CHECK(v.d_star == 3.0);
}
