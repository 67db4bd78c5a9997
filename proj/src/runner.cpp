#include "mialab/runner.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace mialab {

namespace {

const std::set<std::string> kExperiments = {"game",     "spiked-game", "sweep",
                                            "hardness", "theory",      "bounds"};
const std::set<std::string> kAttacks = {"informed-np",          "known-cov",
                                        "unknown-cov",          "restricted-threshold",
                                        "sufficient-stat",      "always-in"};
const std::set<std::string> kSweepParams = {"n", "d", "m", "k", "rho", "sigma2"};

[[noreturn]] void config_fail(const std::string& what, int line) {
  throw ConfigError(what + " (line " + std::to_string(line) + ")");
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

long long parse_int(const std::string& v, const std::string& key, int line) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    config_fail("malformed value for key '" + key + "'", line);
  }
}

double parse_real(const std::string& v, const std::string& key, int line) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    config_fail("malformed value for key '" + key + "'", line);
  }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key, int line) {
  try {
    size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    config_fail("malformed value for key '" + key + "'", line);
  }
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  bool seed_seen = false;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;

    const auto eq = raw.find('=');
    if (eq == std::string::npos) config_fail("expected 'key = value'", line);
    const std::string key = trim(raw.substr(0, eq));
    const std::string value = trim(raw.substr(eq + 1));
    if (key.empty()) config_fail("empty key", line);
    if (value.empty()) config_fail("empty value for key '" + key + "'", line);

    if (key == "experiment") {
      if (!kExperiments.count(value))
        config_fail("unknown experiment '" + value + "'", line);
      cfg.experiment = value;
    } else if (key == "n") {
      cfg.n = int(parse_int(value, key, line));
    } else if (key == "d") {
      cfg.d = int(parse_int(value, key, line));
    } else if (key == "m") {
      cfg.m = int(parse_int(value, key, line));
    } else if (key == "k") {
      cfg.k = int(parse_int(value, key, line));
    } else if (key == "rho") {
      cfg.rho = parse_real(value, key, line);
    } else if (key == "sigma2") {
      cfg.sigma2 = parse_real(value, key, line);
    } else if (key == "attack") {
      if (!kAttacks.count(value)) config_fail("unknown attack '" + value + "'", line);
      cfg.attack = value;
    } else if (key == "threshold_mode") {
      if (value != "fixed-c" && value != "calibrated")
        config_fail("threshold_mode must be fixed-c or calibrated", line);
      cfg.threshold_mode = value;
    } else if (key == "c") {
      cfg.c = parse_real(value, key, line);
    } else if (key == "fpr_target") {
      cfg.fpr_target = parse_real(value, key, line);
    } else if (key == "trials") {
      cfg.trials = int(parse_int(value, key, line));
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, key, line);
      seed_seen = true;
    } else if (key == "threads") {
      cfg.threads = int(parse_int(value, key, line));
    } else if (key == "sweep_param") {
      if (!kSweepParams.count(value))
        config_fail("unknown sweep parameter '" + value + "'", line);
      cfg.sweep_param = value;
    } else if (key == "sweep_values") {
      cfg.sweep_values.clear();
      std::istringstream vs(value);
      std::string tok;
      while (std::getline(vs, tok, ','))
        cfg.sweep_values.push_back(parse_real(trim(tok), key, line));
      if (cfg.sweep_values.empty())
        config_fail("empty value for key 'sweep_values'", line);
    } else {
      config_fail("unknown key '" + key + "'", line);
    }
  }

  if (!seed_seen) throw ConfigError("missing required key 'seed'");
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  if (!(cfg.fpr_target > 0.0 && cfg.fpr_target < 1.0))
    throw ConfigError("fpr_target must lie strictly inside (0,1)");
  if (cfg.sweep_param.empty() != cfg.sweep_values.empty())
    throw ConfigError("sweep_param and sweep_values must be given together");
  if (cfg.experiment == "sweep" && cfg.sweep_param.empty())
    throw ConfigError("experiment 'sweep' requires sweep_param and sweep_values");
  return cfg;
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "experiment = " << cfg.experiment << "\n";
  out << "n = " << cfg.n << "\n";
  out << "d = " << cfg.d << "\n";
  out << "m = " << cfg.m << "\n";
  out << "k = " << cfg.k << "\n";
  out << "rho = " << fmt17(cfg.rho) << "\n";
  out << "sigma2 = " << fmt17(cfg.sigma2) << "\n";
  out << "attack = " << cfg.attack << "\n";
  out << "threshold_mode = " << cfg.threshold_mode << "\n";
  out << "c = " << fmt17(cfg.c) << "\n";
  out << "fpr_target = " << fmt17(cfg.fpr_target) << "\n";
  out << "trials = " << cfg.trials << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "threads = " << cfg.threads << "\n";
  if (!cfg.sweep_param.empty()) {
    out << "sweep_param = " << cfg.sweep_param << "\n";
    out << "sweep_values = ";
    for (size_t i = 0; i < cfg.sweep_values.size(); ++i) {
      if (i) out << ",";
      out << fmt17(cfg.sweep_values[i]);
    }
    out << "\n";
  }
  return out.str();
}

namespace {

struct PointParams {
  int n, d, m, k;
  double rho, sigma2;
};

PointParams resolve_point(const ExperimentConfig& cfg, double value) {
  PointParams p{cfg.n, cfg.d, cfg.m, cfg.k, cfg.rho, cfg.sigma2};
  if (cfg.sweep_param == "n") p.n = int(value);
  else if (cfg.sweep_param == "d") p.d = int(value);
  else if (cfg.sweep_param == "m") p.m = int(value);
  else if (cfg.sweep_param == "k") p.k = int(value);
  else if (cfg.sweep_param == "rho") p.rho = value;
  else if (cfg.sweep_param == "sigma2") p.sigma2 = value;
  return p;
}

AttackClosure make_attack(const ExperimentConfig& cfg, const PointParams& p,
                          double calibrated_tau) {
  if (cfg.attack == "informed-np") {
    if (cfg.threshold_mode == "calibrated") {
      return [calibrated_tau](const MiaChallenge& ch, RngStream&) {
        return decide(informed_np_score(ch.population(), ch.released(), ch.target()),
                      calibrated_tau);
      };
    }
    const ThresholdPolicy policy = ThresholdPolicy::fixed_c(cfg.c);
    return [policy](const MiaChallenge& ch, RngStream& rng) {
      return informed_np_attack(ch.population(), ch.released(), ch.target(), policy,
                                rng);
    };
  }
  if (cfg.attack == "known-cov") {
    const ThresholdPolicy policy = ThresholdPolicy::fixed_c(cfg.c);
    return [policy](const MiaChallenge& ch, RngStream&) {
      const AttackView view = ch.attack_view();
      return known_cov_attack(ch.population().cov, view.aux, view.released,
                              view.target, policy);
    };
  }
  if (cfg.attack == "unknown-cov") {
    const ThresholdPolicy policy = ThresholdPolicy::fixed_c(cfg.c);
    return [policy](const MiaChallenge& ch, RngStream&) {
      const AttackView view = ch.attack_view();
      return unknown_cov_attack(view.aux, view.released, view.target, policy, false);
    };
  }
  if (cfg.attack == "restricted-threshold") {
    const double fpr = cfg.fpr_target;
    return [fpr](const MiaChallenge& ch, RngStream&) {
      const AttackView view = ch.attack_view();
      return restricted_threshold_attack(view.aux, view.released, view.target, fpr);
    };
  }
  if (cfg.attack == "sufficient-stat") {
    const double c = cfg.c;
    return [c](const MiaChallenge& ch, RngStream&) {
      const AttackView view = ch.attack_view();
      return sufficient_stat_attack(view.released, view.target, c);
    };
  }
  if (cfg.attack == "always-in") {
    return [](const MiaChallenge&, RngStream&) {
      return AttackOutcome{1.0, Membership::In, 0.0};
    };
  }
  (void)p;
  throw InvalidArgument("unknown attack identifier '" + cfg.attack + "'");
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment != "game" && cfg.experiment != "spiked-game" &&
      cfg.experiment != "sweep")
    throw InvalidArgument("run_experiment handles game/spiked-game/sweep; use the '" +
                          cfg.experiment + "' subcommand");

  const int threads =
      cfg.threads > 0 ? cfg.threads
                      : std::max(1u, std::thread::hardware_concurrency());
  std::vector<double> values = cfg.sweep_values;
  if (values.empty()) values.push_back(0.0);  // single point, value unused
  const bool swept = !cfg.sweep_param.empty();

  std::vector<ResultRow> rows;
  const RngStream master(cfg.seed);
  for (size_t idx = 0; idx < values.size(); ++idx) {
    const PointParams p = resolve_point(cfg, values[idx]);
    const std::string point_id =
        swept ? cfg.experiment + "." + std::to_string(idx) : cfg.experiment;
    try {
      const RngStream eval_rng = master.substream(2 * idx);
      RngStream calib_rng = master.substream(2 * idx + 1);

      ChallengeGenerator gen;
      if (cfg.experiment == "spiked-game") {
        const SpikedParams sp{p.n, p.d, p.k, p.m, p.sigma2, p.rho};
        gen = [sp](Membership truth, RngStream& rng) {
          auto pair = generate_spiked_challenge(sp, rng);
          return truth == Membership::Out ? std::move(pair.first)
                                          : std::move(pair.second);
        };
      } else {
        const GaussianPopulation pop(VectorXd::Zero(p.d),
                                     CovarianceModel::identity(p.d));
        const int n = p.n, m = p.m;
        const double rho = p.rho;
        gen = [pop, n, m, rho](Membership truth, RngStream& rng) {
          return generate_standard_challenge(pop, n, m, rho, truth, rng);
        };
      }

      // The whitened OUT score of the informed test has the same law for
      // every covariance, so one identity-covariance calibration per sweep
      // point is exact (and cheap) even for the spiked game.
      double tau = 0.0;
      if (cfg.attack == "informed-np" && cfg.threshold_mode == "calibrated") {
        const GaussianPopulation calib_pop(VectorXd::Zero(p.d),
                                           CovarianceModel::identity(p.d));
        tau = informed_np_calibrate(calib_pop, p.n, p.rho, cfg.fpr_target, 2000,
                                    calib_rng);
      }

      const AttackClosure attack = make_attack(cfg, p, tau);
      const EvalReport rep =
          evaluate_attack(attack, gen, cfg.trials, eval_rng, threads);

      ResultRow row;
      row.experiment_id = point_id;
      row.attack = cfg.attack;
      row.n = p.n;
      row.d = p.d;
      row.m = p.m;
      row.k = p.k;
      row.sigma2 = p.sigma2;
      row.rho = p.rho;
      row.trials = rep.trials;
      row.tpr = rep.tpr;
      row.fpr = rep.fpr;
      row.advantage = rep.advantage;
      row.ci_low = rep.ci_low;
      row.ci_high = rep.ci_high;
      row.d_star = d_star(p.n, p.rho);
      row.tv_bound = informed_tv_bound(p.n, p.d, p.rho);
      row.seed = cfg.seed;
      row.wall_ms = rep.wall_ms;
      rows.push_back(std::move(row));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error("sweep point '" + point_id + "': " + e.what());
    }
  }
  return rows;
}

std::string render_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "experiment_id,attack,n,d,m,k,sigma2,rho,trials,tpr,fpr,advantage,"
         "ci_low,ci_high,d_star,tv_bound,seed,wall_ms\n";
  for (const ResultRow& r : rows) {
    out << r.experiment_id << ',' << r.attack << ',' << r.n << ',' << r.d << ','
        << r.m << ',' << r.k << ',' << fmt17(r.sigma2) << ',' << fmt17(r.rho) << ','
        << r.trials << ',' << fmt17(r.tpr) << ',' << fmt17(r.fpr) << ','
        << fmt17(r.advantage) << ',' << fmt17(r.ci_low) << ',' << fmt17(r.ci_high)
        << ',' << fmt17(r.d_star) << ',' << fmt17(r.tv_bound) << ',' << r.seed << ','
        << r.wall_ms << '\n';
  }
  return out.str();
}

void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_csv: cannot open '" + path + "' for writing");
  out << render_csv(rows);
  out.flush();
  if (!out) throw Error("write_csv: write to '" + path + "' failed");
}

}  // namespace mialab
