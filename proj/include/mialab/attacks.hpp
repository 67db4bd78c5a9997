#pragma once

#include "mialab/gaussians.hpp"
#include "mialab/mechanisms.hpp"

namespace mialab {

enum class Membership { In, Out };

struct AttackOutcome {
  double score = 0.0;
  Membership decision = Membership::Out;
  double threshold_used = 0.0;
};

// Threshold selection for score-based attacks.
//   FixedC: threshold c * d / n. The IN-case mean score is d/n and the
//     OUT-case mean is 0, so the default c = 1/2 puts the threshold at the
//     midpoint.
//   CalibratedFPR: threshold is the empirical (1 - target)-quantile of the
//     score under freshly simulated OUT challenges.
struct ThresholdPolicy {
  enum class Kind { FixedC, CalibratedFPR };
  Kind kind = Kind::FixedC;
  double c = 0.5;            // FixedC
  double fpr_target = 0.45;  // CalibratedFPR

  static ThresholdPolicy fixed_c(double c = 0.5) {
    return ThresholdPolicy{Kind::FixedC, c, 0.45};
  }
  static ThresholdPolicy calibrated(double target = 0.45) {
    if (!(target > 0.0 && target < 1.0))
      throw InvalidArgument("calibration FPR target must lie strictly inside (0,1)");
    return ThresholdPolicy{Kind::CalibratedFPR, 0.5, target};
  }
};

inline AttackOutcome decide(double score, double threshold) {
  return AttackOutcome{score, score >= threshold ? Membership::In : Membership::Out,
                       threshold};
}

// ---------------------------------------------------------------------------
// Fully informed Neyman-Pearson test: score (x - mu)^T Sigma^{-1} (mu_hat - mu).
// ---------------------------------------------------------------------------

double informed_np_score(const GaussianPopulation& pop, const ReleasedEstimate& est,
                         const VectorXd& target);

// Empirical (1 - fpr_target)-quantile of the informed score over `sims`
// freshly simulated OUT challenges for (pop, n, rho).
double informed_np_calibrate(const GaussianPopulation& pop, int n, double rho,
                             double fpr_target, int sims, RngStream& rng);

AttackOutcome informed_np_attack(const GaussianPopulation& pop,
                                 const ReleasedEstimate& est, const VectorXd& target,
                                 const ThresholdPolicy& policy, RngStream& rng);

// ---------------------------------------------------------------------------
// Sample-based attacks.
// ---------------------------------------------------------------------------

// Known covariance: aux splits into a reference block of size
// m2 = min{n, ceil(1/rho^2), m-1} (averaged to mu_bar) and a holdout last
// row Y0; score = <W(mu_hat - mu_bar), W(target - Y0)> with W the whitener.
double known_cov_score(const CovarianceModel& cov, const MatrixXd& aux,
                       const ReleasedEstimate& est, const VectorXd& target);
AttackOutcome known_cov_attack(const CovarianceModel& cov, const MatrixXd& aux,
                               const ReleasedEstimate& est, const VectorXd& target,
                               const ThresholdPolicy& policy);

// Unknown covariance: three-way split. m1 = m - m2 - 1 >= 2*dim rows feed the
// empirical precision H, m2 rows the mean estimate, the last row is the
// holdout; score = (mu_hat - mu_bar)^T H (target - Y0).
double unknown_cov_score(const MatrixXd& aux, const ReleasedEstimate& est,
                         const VectorXd& target, bool assume_zero_mean);
AttackOutcome unknown_cov_attack(const MatrixXd& aux, const ReleasedEstimate& est,
                                 const VectorXd& target, const ThresholdPolicy& policy,
                                 bool assume_zero_mean);

// Restricted shadow-calibrated attack: distribution-independent statistic
// <x, mu_hat>, threshold calibrated as the empirical (1 - fpr_target)-quantile
// of the aux scores (aux rows are fresh population draws, hence OUT
// surrogates against the released mu_hat).
AttackOutcome restricted_threshold_attack(const MatrixXd& aux,
                                          const ReleasedEstimate& est,
                                          const VectorXd& target, double fpr_target);

// Zero-auxiliary attack consuming only the sufficient triple
// (|x|, |mu_hat|, <x, mu_hat>): score = sqrt(d) * cos(target, mu_hat).
double sufficient_stat_score(const ReleasedEstimate& est, const VectorXd& target);
AttackOutcome sufficient_stat_attack(const ReleasedEstimate& est, const VectorXd& target,
                                     double c = 1.0);

}  // namespace mialab
