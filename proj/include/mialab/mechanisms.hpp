#pragma once

#include "mialab/gaussians.hpp"

namespace mialab {

// Output of a mean-release mechanism: mu_hat together with the mechanism
// parameters the attacker is assumed to know (noise scale rho, training size n).
struct ReleasedEstimate {
  VectorXd mu_hat;
  double rho = 0.0;
  int n = 0;

  int dim() const { return int(mu_hat.size()); }
};

// Estimated precision matrix H ~ Sigma^{-1} built from reference samples.
// The factorization of the empirical covariance is kept, so quadratic forms
// in H cost O(d^2) instead of materializing the inverse.
class PrecisionEstimate {
public:
  PrecisionEstimate(Eigen::LLT<MatrixXd> llt, int samples_used, bool centered)
      : llt_(std::move(llt)), samples_used_(samples_used), centered_(centered) {}

  int dim() const { return int(llt_.matrixLLT().rows()); }
  int samples_used() const { return samples_used_; }
  bool centered() const { return centered_; }

  // x^T H y
  double quad(const VectorXd& x, const VectorXd& y) const {
    return x.dot(llt_.solve(y));
  }

  // Dense H = Sigma_hat^{-1}. O(d^3); test and inspection use.
  MatrixXd matrix() const {
    const int d = dim();
    return llt_.solve(MatrixXd::Identity(d, d));
  }

private:
  Eigen::LLT<MatrixXd> llt_;
  int samples_used_;
  bool centered_;
};

// mu_hat = row-mean(data) + rho * Z with Z ~ N(0, noise_cov), Z independent
// of data. The mechanism knows the true Sigma.
ReleasedEstimate noisy_empirical_mean(const MatrixXd& data, double rho,
                                      const CovarianceModel& noise_cov,
                                      RngStream& rng);

// Inverse of the empirical covariance of `samples`. With assume_zero_mean the
// uncentered second moment (1/m) sum Y_i Y_i^T is used; otherwise the centered
// (m-1)-normalized estimator. No ridge regularization: a singular estimate is
// a typed error, never papered over.
PrecisionEstimate empirical_precision(const MatrixXd& samples, bool assume_zero_mean);

}  // namespace mialab
