#include "mialab/mechanisms.hpp"

namespace mialab {

ReleasedEstimate noisy_empirical_mean(const MatrixXd& data, double rho,
                                      const CovarianceModel& noise_cov,
                                      RngStream& rng) {
  const int n = int(data.rows());
  if (n < 1) throw InvalidArgument("noisy_empirical_mean needs at least one data row");
  if (data.cols() != noise_cov.dim())
    throw InvalidArgument("noisy_empirical_mean: data and noise covariance dimensions differ");
  if (rho < 0.0) throw InvalidArgument("noise scale rho must be nonnegative");

  VectorXd mu_hat = data.colwise().mean().transpose();
  // Z is drawn even when rho == 0 so the rng consumption (and therefore
  // everything downstream of this stream) does not depend on rho.
  const VectorXd z = noise_cov.sample_centered(rng);
  if (rho > 0.0) mu_hat += rho * z;
  return ReleasedEstimate{std::move(mu_hat), rho, n};
}

PrecisionEstimate empirical_precision(const MatrixXd& samples, bool assume_zero_mean) {
  const int m = int(samples.rows());
  const int d = int(samples.cols());
  const int min_m = assume_zero_mean ? d + 1 : d + 2;
  if (m < min_m)
    throw InvalidArgument("insufficient reference samples for precision estimation");

  MatrixXd sigma_hat = MatrixXd::Zero(d, d);
  if (assume_zero_mean) {
    sigma_hat.selfadjointView<Eigen::Lower>().rankUpdate(samples.transpose(),
                                                         1.0 / double(m));
  } else {
    const MatrixXd centered = samples.rowwise() - samples.colwise().mean();
    sigma_hat.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(),
                                                         1.0 / double(m - 1));
  }
  sigma_hat = sigma_hat.selfadjointView<Eigen::Lower>();

  Eigen::LLT<MatrixXd> llt(sigma_hat);
  if (llt.info() != Eigen::Success)
    throw FactorizationError("insufficient reference samples: empirical covariance is singular");
  return PrecisionEstimate(std::move(llt), m, !assume_zero_mean);
}

}  // namespace mialab
