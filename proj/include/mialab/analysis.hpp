#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mialab/challenges.hpp"

namespace mialab {

// TPR/FPR of a membership test over paired IN/OUT trials, with a 95%
// confidence interval on the advantage (difference of independent Wilson
// intervals, conservatively combined).
struct EvalReport {
  double tpr = 0.0;
  double fpr = 0.0;
  double advantage = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int trials = 0;
  long long wall_ms = 0;
};

// Closed-form bound values for a parameter point.
struct BoundReport {
  double d_star = 0.0;
  double tv_bound = 0.0;
  std::optional<double> kl_exact;
};

using ChallengeGenerator = std::function<MiaChallenge(Membership, RngStream&)>;
using AttackClosure = std::function<AttackOutcome(const MiaChallenge&, RngStream&)>;

// Runs `trials` IN and `trials` OUT challenges. Each trial's RngStream is the
// substream 2*trial + arm of `rng` (arm: 0 = OUT, 1 = IN), split once more
// into a generator stream and an attack stream, so the result is independent
// of execution order and thread count. Attack errors abort the evaluation
// with the failing trial identified.
EvalReport evaluate_attack(const AttackClosure& attack,
                           const ChallengeGenerator& generator, int trials,
                           const RngStream& rng, int threads = 1);

// d*(n, rho) = n + n^2 rho^2, the informed-attacker dimension threshold.
double d_star(int n, double rho);

// sqrt(d / d*(n, rho)): upper bound on the advantage of any informed test.
double informed_tv_bound(int n, int d, double rho);

// KL(N(mu1, cov1) || N(mu2, cov2)) in closed form.
double gaussian_kl(const VectorXd& mu1, const MatrixXd& cov1, const VectorXd& mu2,
                   const MatrixXd& cov2);

// Known-covariance lower-bound quantities: kl_exact is computed from the
// per-coordinate 2x2 blocks of the IN/OUT joint covariances (alpha^2 = 1/n +
// rho^2, off-diagonal 1/(m+1) vs 1/(m+1) + 1/n), scaled by d; tv_bound is
// sqrt(d / (n^2/(4(m+1)) + n/8 + n^2 rho^2 / 4)). Requires n >= 4, m >= 2.
BoundReport known_cov_bounds(int n, int m, int d, double rho);

// The two 2d x 2d joint covariance matrices behind known_cov_bounds,
// materialized for oracle cross-checks: first the IN joint, then the OUT.
std::pair<MatrixXd, MatrixXd> known_cov_joint_covariances(int n, int m, int d,
                                                          double rho);

// Parameters shared by the numerical theory checks; each check reads the
// fields it needs (defaults satisfy every precondition).
struct TheoryParams {
  int n = 10;               // TC1, TC9
  int d = 10;               // TC1, TC3, TC7, TC9
  double rho = 0.0;         // TC1, TC9
  double sigma2 = 0.0;      // TC1 spike variance (0 = identity covariance)
  int spike_rank = 2;       // TC1
  int k = 8;                // TC4, TC5 chi-square degrees of freedom (> 4)
  int m = 5;                // TC6 observation count
  double prior_sigma2 = 2.0;  // TC6 prior variance
  double s = 0.5;           // TC3 exponential tilt
  double gamma = 0.25;      // TC2/TC7 spike size, TC4 scale excess (TC7: < 1)
  double a = 1.0;           // TC4 shift c, TC5 shift, TC8 coefficient a
  double r = 0.1;           // TC5 scale excess
  double b = 1.0;           // TC8 coefficient b
  double c = 1.0;           // TC8 conditioning value
};

struct CheckResult {
  std::string check_id;
  double measured = 0.0;
  double predicted = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

// check_id in 1..9 (TC1..TC9). `trials` scales the Monte Carlo checks; the
// exact checks (TC2, TC6, TC8) ignore it.
CheckResult run_theory_check(int check_id, const TheoryParams& params, int trials,
                             RngStream& rng);

// The full check table the CLI and the acceptance gate print: TC1..TC9 at
// default parameters, with TC3 run at (d, s) in {(1,0), (4,0.5), (10,1)}.
std::vector<CheckResult> run_all_theory_checks(std::uint64_t seed);

}  // namespace mialab
