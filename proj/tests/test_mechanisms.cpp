#include <cmath>

#include "doctest.h"
#include "mialab/mechanisms.hpp"

using namespace mialab;

TEST_CASE("noisy_empirical_mean: rho = 0 is the exact sample mean") {
  const GaussianPopulation pop(VectorXd::Zero(5), CovarianceModel::identity(5));
  RngStream rng(21);
  const MatrixXd data = sample_population(pop, 8, rng);
  const ReleasedEstimate est = noisy_empirical_mean(data, 0.0, pop.cov, rng);
  CHECK((est.mu_hat - data.colwise().mean().transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(est.n == 8);
  CHECK(est.rho == 0.0);
}

TEST_CASE("noisy_empirical_mean: rho = 0, n = 1 returns the row exactly") {
  const GaussianPopulation pop(VectorXd::Ones(4), CovarianceModel::identity(4));
  RngStream rng(22);
  const MatrixXd data = sample_population(pop, 1, rng);
  const ReleasedEstimate est = noisy_empirical_mean(data, 0.0, pop.cov, rng);
  CHECK(est.mu_hat.transpose().cwiseEqual(data.row(0)).all());
}

TEST_CASE("noisy_empirical_mean: determinism") {
  const CovarianceModel cov = CovarianceModel::identity(6);
  MatrixXd data(3, 6);
  data.setOnes();
  RngStream a(23), b(23);
  const ReleasedEstimate ea = noisy_empirical_mean(data, 0.7, cov, a);
  const ReleasedEstimate eb = noisy_empirical_mean(data, 0.7, cov, b);
  CHECK(ea.mu_hat.cwiseEqual(eb.mu_hat).all());
}

TEST_CASE("noisy_empirical_mean: row permutation leaves mu_hat unchanged") {
  const CovarianceModel cov = CovarianceModel::identity(4);
  RngStream src(24);
  const GaussianPopulation pop(VectorXd::Zero(4), cov);
  const MatrixXd data = sample_population(pop, 5, src);
  MatrixXd permuted = data;
  permuted.row(0) = data.row(4);
  permuted.row(4) = data.row(0);
  RngStream a(25), b(25);
  const ReleasedEstimate ea = noisy_empirical_mean(data, 0.4, cov, a);
  const ReleasedEstimate eb = noisy_empirical_mean(permuted, 0.4, cov, b);
  CHECK((ea.mu_hat - eb.mu_hat).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("noisy_empirical_mean: E||mu_hat||_Sigma^2 = d (1/n + rho^2)") {
  const int d = 20, n = 10, trials = 10000;
  const double rho = 0.5;
  const GaussianPopulation pop(VectorXd::Zero(d), CovarianceModel::identity(d));
  RngStream rng(26);
  double m1 = 0.0, m2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    const MatrixXd data = sample_population(pop, n, rng);
    const ReleasedEstimate est = noisy_empirical_mean(data, rho, pop.cov, rng);
    const double v = pop.cov.quad_form_inverse(est.mu_hat);
    m1 += v;
    m2 += v * v;
  }
  m1 /= trials;
  m2 /= trials;
  const double se = std::sqrt(std::max(m2 - m1 * m1, 0.0) / trials);
  CHECK(std::abs(m1 - 7.0) <= 5.0 * se);
}

TEST_CASE("empirical_precision: 1-d zero-mean unit variance") {
  MatrixXd samples(4, 1);
  samples << 1, -1, 1, -1;
  const PrecisionEstimate prec = empirical_precision(samples, true);
  VectorXd one = VectorXd::Ones(1);
  CHECK(prec.quad(one, one) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empirical_precision: m = dim is rejected") {
  RngStream rng(27);
  const GaussianPopulation pop(VectorXd::Zero(5), CovarianceModel::identity(5));
  const MatrixXd samples = sample_population(pop, 5, rng);
  CHECK_THROWS_AS(empirical_precision(samples, true), Error);
}

TEST_CASE("empirical_precision: operator-norm accuracy at m = 64 d") {
  const int d = 20, m = 1280, trials = 200;
  const GaussianPopulation pop(VectorXd::Zero(d), CovarianceModel::identity(d));
  RngStream rng(28);
  int ok = 0;
  for (int t = 0; t < trials; ++t) {
    const MatrixXd samples = sample_population(pop, m, rng);
    const MatrixXd h = empirical_precision(samples, true).matrix();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(h - MatrixXd::Identity(d, d));
    const double op = std::max(std::abs(eig.eigenvalues().minCoeff()),
                               std::abs(eig.eigenvalues().maxCoeff()));
    if (op <= 0.5) ++ok;
  }
  CHECK(double(ok) / trials >= 0.99);
}

TEST_CASE("empirical_precision: scaling samples by c scales H by 1/c^2") {
  const int d = 6, m = 20;
  const GaussianPopulation pop(VectorXd::Zero(d), CovarianceModel::identity(d));
  RngStream rng(29);
  const MatrixXd samples = sample_population(pop, m, rng);
  const double c = 3.0;
  const MatrixXd h1 = empirical_precision(samples, false).matrix();
  const MatrixXd h2 = empirical_precision(c * samples, false).matrix();
  CHECK((h2 - h1 / (c * c)).cwiseAbs().maxCoeff() <=
        1e-10 * h1.cwiseAbs().maxCoeff());
}
