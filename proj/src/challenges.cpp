#include "mialab/challenges.hpp"

namespace mialab {

MiaChallenge generate_standard_challenge(const GaussianPopulation& pop, int n, int m,
                                         double rho, Membership truth, RngStream& rng) {
  if (n < 1) throw InvalidArgument("generate_standard_challenge needs n >= 1");
  if (m < 0) throw InvalidArgument("auxiliary sample count must be nonnegative");

  // Draw order fixed as X_0, X_1..X_n, noise Z, then Y_1..Y_m.
  const MatrixXd x = sample_population(pop, n + 1, rng);
  ReleasedEstimate released = noisy_empirical_mean(x.bottomRows(n), rho, pop.cov, rng);
  MatrixXd aux = sample_population(pop, m, rng);

  VectorXd target = (truth == Membership::In ? x.row(1) : x.row(0)).transpose();
  return MiaChallenge(std::move(aux), std::move(released), std::move(target), truth,
                      pop);
}

std::pair<MiaChallenge, MiaChallenge> generate_spiked_challenge(const SpikedParams& p,
                                                                RngStream& rng) {
  if (p.n < 1) throw InvalidArgument("generate_spiked_challenge needs n >= 1");
  if (p.m < 0) throw InvalidArgument("auxiliary sample count must be nonnegative");
  if (p.k < 1 || p.k > p.d)
    throw InvalidArgument("generate_spiked_challenge requires 1 <= k <= d");
  if (p.sigma2 < 0.0)
    throw InvalidArgument("generate_spiked_challenge needs sigma2 >= 0");

  // Fresh Haar subspace per challenge; the prior over hidden directions is
  // part of the instance, never reused across trials. sigma2 = 0 degenerates
  // to the identity covariance.
  CovarianceModel cov = CovarianceModel::identity(p.d);
  if (p.sigma2 > 0.0) {
    MatrixXd u = sample_uniform_projection(p.d, p.k, rng);
    cov = CovarianceModel::spiked(p.d, p.sigma2, std::move(u));
  }
  GaussianPopulation pop(VectorXd::Zero(p.d), std::move(cov));

  const MatrixXd x = sample_population(pop, p.n + 1, rng);
  ReleasedEstimate released =
      noisy_empirical_mean(x.bottomRows(p.n), p.rho, pop.cov, rng);
  MatrixXd aux = sample_population(pop, p.m, rng);

  // The two challenges share aux and released (mu_hat_0 = mu_hat_1) and differ
  // only in the target: X_0 (OUT) vs X_1 (IN).
  MiaChallenge out(aux, released, x.row(0).transpose(), Membership::Out, pop);
  MiaChallenge in(std::move(aux), std::move(released), x.row(1).transpose(),
                  Membership::In, std::move(pop));
  return {std::move(out), std::move(in)};
}

LbParameterReport lb_parameter_check(const SpikedParams& p, double c_dim, int n_dir) {
  const double budget = double(p.n) + double(p.n) * double(p.n) * p.rho * p.rho;
  LbParameterReport r;
  r.sample_budget_ok = 400.0 * double(p.m) <= budget;
  r.directions_ok = p.k == p.m + n_dir;
  r.variance_ok = p.sigma2 >= c_dim * double(p.d);
  r.dimension_ok = double(p.d) >= c_dim * budget;
  r.all_ok = r.sample_budget_ok && r.directions_ok && r.variance_ok && r.dimension_ok;
  return r;
}

}  // namespace mialab
