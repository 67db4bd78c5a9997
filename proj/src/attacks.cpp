#include "mialab/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mialab {

namespace {

// Reference-block size shared by the known- and unknown-covariance attacks:
// min{n, ceil(1/rho^2), cap}.
int mean_block_size(int n, double rho, int cap) {
  int m2 = std::min(n, cap);
  if (rho > 0.0) {
    const double inv = std::ceil(1.0 / (rho * rho));
    if (inv < double(m2)) m2 = int(inv);
  }
  return std::max(m2, 1);
}

// k-th order statistic with k = ceil(q * len), as the empirical q-quantile.
double empirical_quantile(std::vector<double>& scores, double q) {
  const int len = int(scores.size());
  int k = int(std::ceil(q * double(len)));
  k = std::clamp(k, 1, len);
  std::nth_element(scores.begin(), scores.begin() + (k - 1), scores.end());
  return scores[k - 1];
}

}  // namespace

double informed_np_score(const GaussianPopulation& pop, const ReleasedEstimate& est,
                         const VectorXd& target) {
  if (target.size() != pop.dim() || est.dim() != pop.dim())
    throw InvalidArgument("informed_np_score: dimension mismatch");
  return pop.cov.quad_form_inverse(target - pop.mean, est.mu_hat - pop.mean);
}

double informed_np_calibrate(const GaussianPopulation& pop, int n, double rho,
                             double fpr_target, int sims, RngStream& rng) {
  std::vector<double> scores;
  scores.reserve(sims);
  for (int i = 0; i < sims; ++i) {
    const MatrixXd data = sample_population(pop, n, rng);
    const ReleasedEstimate est = noisy_empirical_mean(data, rho, pop.cov, rng);
    const VectorXd x0 = pop.mean + pop.cov.sample_centered(rng);
    scores.push_back(informed_np_score(pop, est, x0));
  }
  return empirical_quantile(scores, 1.0 - fpr_target);
}

AttackOutcome informed_np_attack(const GaussianPopulation& pop,
                                 const ReleasedEstimate& est, const VectorXd& target,
                                 const ThresholdPolicy& policy, RngStream& rng) {
  const double score = informed_np_score(pop, est, target);
  double threshold;
  if (policy.kind == ThresholdPolicy::Kind::FixedC) {
    threshold = policy.c * double(pop.dim()) / double(est.n);
  } else {
    threshold = informed_np_calibrate(pop, est.n, est.rho, policy.fpr_target, 2000, rng);
  }
  return decide(score, threshold);
}

double known_cov_score(const CovarianceModel& cov, const MatrixXd& aux,
                       const ReleasedEstimate& est, const VectorXd& target) {
  const int m = int(aux.rows());
  if (m < 2) throw InvalidArgument("known_cov_attack needs at least 2 auxiliary samples");
  if (aux.cols() != cov.dim() || est.dim() != cov.dim() || target.size() != cov.dim())
    throw InvalidArgument("known_cov_attack: dimension mismatch");

  const int m2 = mean_block_size(est.n, est.rho, m - 1);
  const VectorXd mu_bar = aux.topRows(m2).colwise().mean().transpose();
  const VectorXd holdout = aux.row(m - 1).transpose();
  return cov.whiten(est.mu_hat - mu_bar).dot(cov.whiten(target - holdout));
}

AttackOutcome known_cov_attack(const CovarianceModel& cov, const MatrixXd& aux,
                               const ReleasedEstimate& est, const VectorXd& target,
                               const ThresholdPolicy& policy) {
  if (policy.kind != ThresholdPolicy::Kind::FixedC)
    throw InvalidArgument("known_cov_attack supports only the fixed-c policy");
  const double score = known_cov_score(cov, aux, est, target);
  return decide(score, policy.c * double(cov.dim()) / double(est.n));
}

double unknown_cov_score(const MatrixXd& aux, const ReleasedEstimate& est,
                         const VectorXd& target, bool assume_zero_mean) {
  const int m = int(aux.rows());
  const int d = int(aux.cols());
  if (est.dim() != d || target.size() != d)
    throw InvalidArgument("unknown_cov_attack: dimension mismatch");
  if (m < 2 * d + 2)
    throw InvalidArgument("insufficient reference samples: unknown_cov_attack needs m >= 2*dim + 2");

  const int m2 = mean_block_size(est.n, est.rho, m - 2 * d - 1);
  const int m1 = m - m2 - 1;
  const PrecisionEstimate prec =
      empirical_precision(aux.topRows(m1), assume_zero_mean);
  const VectorXd mu_bar = aux.middleRows(m1, m2).colwise().mean().transpose();
  const VectorXd holdout = aux.row(m - 1).transpose();
  return prec.quad(est.mu_hat - mu_bar, target - holdout);
}

AttackOutcome unknown_cov_attack(const MatrixXd& aux, const ReleasedEstimate& est,
                                 const VectorXd& target, const ThresholdPolicy& policy,
                                 bool assume_zero_mean) {
  if (policy.kind != ThresholdPolicy::Kind::FixedC)
    throw InvalidArgument("unknown_cov_attack supports only the fixed-c policy");
  const double score = unknown_cov_score(aux, est, target, assume_zero_mean);
  return decide(score, policy.c * double(aux.cols()) / double(est.n));
}

AttackOutcome restricted_threshold_attack(const MatrixXd& aux,
                                          const ReleasedEstimate& est,
                                          const VectorXd& target, double fpr_target) {
  const int m = int(aux.rows());
  if (m < 20)
    throw InvalidArgument("restricted_threshold_attack needs at least 20 auxiliary samples");
  if (aux.cols() != est.dim() || target.size() != est.dim())
    throw InvalidArgument("restricted_threshold_attack: dimension mismatch");
  if (!(fpr_target > 0.0 && fpr_target < 1.0))
    throw InvalidArgument("fpr_target must lie strictly inside (0,1)");

  std::vector<double> scores(m);
  const VectorXd aux_scores = aux * est.mu_hat;
  for (int i = 0; i < m; ++i) scores[i] = aux_scores[i];
  const double tau = empirical_quantile(scores, 1.0 - fpr_target);
  return decide(target.dot(est.mu_hat), tau);
}

double sufficient_stat_score(const ReleasedEstimate& est, const VectorXd& target) {
  if (target.size() != est.dim())
    throw InvalidArgument("sufficient_stat_attack: dimension mismatch");
  const double tn = target.norm();
  const double mn = est.mu_hat.norm();
  if (tn == 0.0 || mn == 0.0)
    throw InvalidArgument("sufficient_stat_attack: zero-norm input");
  return std::sqrt(double(est.dim())) * target.dot(est.mu_hat) / (tn * mn);
}

AttackOutcome sufficient_stat_attack(const ReleasedEstimate& est, const VectorXd& target,
                                     double c) {
  return decide(sufficient_stat_score(est, target), c);
}

}  // namespace mialab
