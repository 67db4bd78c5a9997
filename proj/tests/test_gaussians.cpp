#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "mialab/gaussians.hpp"

using namespace mialab;

namespace {

MatrixXd random_spd(int d, RngStream& rng) {
  MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.next_gauss();
  return a * a.transpose() + double(d) * MatrixXd::Identity(d, d);
}

VectorXd random_vec(int d, RngStream& rng) {
  VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.next_gauss();
  return v;
}

CovarianceModel spiked_e1(int dim, double sigma2) {
  MatrixXd u = MatrixXd::Zero(dim, 1);
  u(0, 0) = 1.0;
  return CovarianceModel::spiked(dim, sigma2, u);
}

}  // namespace

TEST_CASE("sample_population: empty count") {
  const GaussianPopulation pop(VectorXd::Zero(3), CovarianceModel::identity(3));
  RngStream rng(1);
  const MatrixXd out = sample_population(pop, 0, rng);
  CHECK(out.rows() == 0);
  CHECK(out.cols() == 3);
}

TEST_CASE("sample_population: determinism") {
  const GaussianPopulation pop(VectorXd::Ones(4), CovarianceModel::identity(4));
  RngStream a(42), b(42);
  const MatrixXd ma = sample_population(pop, 7, a);
  const MatrixXd mb = sample_population(pop, 7, b);
  CHECK(ma.cwiseEqual(mb).all());
}

TEST_CASE("sample_population: spiked per-coordinate variances") {
  // Sigma = diag(4, 1) for sigma2 = 3, U = e1.
  const GaussianPopulation pop(VectorXd::Zero(2), spiked_e1(2, 3.0));
  RngStream rng(7);
  const int rows = 100000;
  const MatrixXd s = sample_population(pop, rows, rng);
  for (int j = 0; j < 2; ++j) {
    const double expected = j == 0 ? 4.0 : 1.0;
    double m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < rows; ++i) {
      const double v = s(i, j) * s(i, j);
      m2 += v;
      m4 += v * v;
    }
    m2 /= rows;
    m4 /= rows;
    const double se = std::sqrt((m4 - m2 * m2) / rows);
    CHECK(std::abs(m2 - expected) <= 5.0 * se);
  }
}

TEST_CASE("quad_form_inverse: identity, spiked, dense") {
  RngStream rng(3);
  const VectorXd y = random_vec(5, rng);
  CHECK(CovarianceModel::identity(5).quad_form_inverse(y) ==
        doctest::Approx(y.squaredNorm()).epsilon(1e-12));

  const VectorXd ones = VectorXd::Ones(2);
  CHECK(spiked_e1(2, 3.0).quad_form_inverse(ones) ==
        doctest::Approx(1.25).epsilon(1e-12));

  const CovarianceModel dense = CovarianceModel::dense(2.0 * MatrixXd::Identity(2, 2));
  VectorXd e1 = VectorXd::Zero(2);
  e1[0] = 1.0;
  CHECK(dense.quad_form_inverse(e1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("log_det: identity, spiked, dense") {
  CHECK(CovarianceModel::identity(5).log_det() == 0.0);
  MatrixXd u = MatrixXd::Identity(6, 3);
  CHECK(CovarianceModel::spiked(6, 1.0, u).log_det() ==
        doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(CovarianceModel::dense(2.0 * MatrixXd::Identity(2, 2)).log_det() ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("whiten: identity, spiked, dense bilinear contract") {
  RngStream rng(4);
  const VectorXd x5 = random_vec(5, rng);
  CHECK(CovarianceModel::identity(5).whiten(x5).cwiseEqual(x5).all());

  VectorXd e1 = VectorXd::Zero(2);
  e1[0] = 1.0;
  const VectorXd w = spiked_e1(2, 3.0).whiten(e1);
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.0).epsilon(1e-12));

  const MatrixXd m = random_spd(5, rng);
  const CovarianceModel dense = CovarianceModel::dense(m);
  const VectorXd x = random_vec(5, rng), y = random_vec(5, rng);
  const double via_whiten = dense.whiten(x).dot(dense.whiten(y));
  const double oracle = x.dot(m.inverse() * y);
  CHECK(std::abs(via_whiten - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)));
}

TEST_CASE("whiten is linear") {
  RngStream rng(5);
  const MatrixXd u = sample_uniform_projection(8, 3, rng);
  const CovarianceModel cov = CovarianceModel::spiked(8, 2.5, u);
  const VectorXd x = random_vec(8, rng), y = random_vec(8, rng);
  const double a = 1.7, b = -0.3;
  const VectorXd lhs = cov.whiten(a * x + b * y);
  const VectorXd rhs = a * cov.whiten(x) + b * cov.whiten(y);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("spiked quad form matches dense oracle (Sherman-Morrison)") {
  RngStream rng(6);
  for (const int d : {10, 30, 50}) {
    const int k = std::max(1, d / 6);
    const MatrixXd u = sample_uniform_projection(d, k, rng);
    const CovarianceModel spiked = CovarianceModel::spiked(d, 1.8, u);
    const CovarianceModel dense = CovarianceModel::dense(spiked.materialize());
    const VectorXd x = random_vec(d, rng), y = random_vec(d, rng);
    const double a = spiked.quad_form_inverse(x, y);
    const double b = dense.quad_form_inverse(x, y);
    CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("exp(log_det) matches materialized determinant") {
  RngStream rng(8);
  for (const int d : {4, 12, 20}) {
    const MatrixXd u = sample_uniform_projection(d, 2, rng);
    const CovarianceModel spiked = CovarianceModel::spiked(d, 0.9, u);
    const double det = spiked.materialize().determinant();
    CHECK(std::abs(std::exp(spiked.log_det()) - det) <= 1e-8 * std::abs(det));
  }
}

TEST_CASE("sample_uniform_projection: orthonormality and full space") {
  RngStream rng(9);
  const MatrixXd u = sample_uniform_projection(10, 4, rng);
  CHECK((u.transpose() * u - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);

  const MatrixXd full = sample_uniform_projection(6, 6, rng);
  CHECK((full * full.transpose() - MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <=
        1e-10);
}

TEST_CASE("sample_uniform_projection: E[UU^T] = (k/d) I") {
  RngStream rng(10);
  const int dim = 6, k = 2, draws = 10000;
  MatrixXd mean = MatrixXd::Zero(dim, dim);
  MatrixXd sq = MatrixXd::Zero(dim, dim);
  for (int t = 0; t < draws; ++t) {
    const MatrixXd u = sample_uniform_projection(dim, k, rng);
    const MatrixXd p = u * u.transpose();
    mean += p;
    sq += p.cwiseProduct(p);
  }
  mean /= draws;
  sq /= draws;
  const MatrixXd target = (double(k) / dim) * MatrixXd::Identity(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double se =
          std::sqrt(std::max(sq(i, j) - mean(i, j) * mean(i, j), 0.0) / draws);
      CHECK(std::abs(mean(i, j) - target(i, j)) <= 5.0 * se + 1e-12);
    }
}

TEST_CASE("constrained_projection_sample: constraint satisfaction") {
  RngStream rng(11);
  VectorXd x(6), y(6);
  x << 1, 0, 1, 0, 0, 0;
  y << 1, 0, 0, 0, 0, 0;
  const MatrixXd pi = constrained_projection_sample({{x, y}}, 2, rng);
  CHECK((pi * x - y).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((pi - pi.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((pi * pi - pi).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(std::abs(pi.trace() - 2.0) <= 1e-6);
}

TEST_CASE("constrained_projection_sample: fixed points") {
  RngStream rng(12);
  VectorXd e1 = VectorXd::Zero(8);
  e1[0] = 1.0;
  const MatrixXd pi = constrained_projection_sample({{e1, e1}}, 3, rng);
  CHECK((pi * e1 - e1).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("constrained_projection_sample: inconsistent constraints") {
  RngStream rng(13);
  // y = x/2 forces <y, x - y> != 0, which no orthogonal projection allows.
  VectorXd x = VectorXd::Zero(6), y = VectorXd::Zero(6);
  x[0] = 1.0;
  y[0] = 0.5;
  CHECK_THROWS_AS(constrained_projection_sample({{x, y}}, 2, rng),
                  InconsistentConstraints);
}

TEST_CASE("constrained_projection_sample: random draws keep all properties") {
  RngStream rng(14);
  const int d = 12, m = 4;
  for (int rep = 0; rep < 20; ++rep) {
    // One orthonormal fixed point: y = x on a random unit vector.
    VectorXd x = random_vec(d, rng);
    x /= x.norm();
    const MatrixXd pi = constrained_projection_sample({{x, x}}, m, rng);
    CHECK((pi - pi.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((pi * pi - pi).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(std::abs(pi.trace() - double(m)) <= 1e-6);
    CHECK((pi * x - x).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("rotate_samples: identity, permutation, non-orthogonal") {
  RngStream rng(15);
  MatrixXd samples(3, 4);
  for (int i = 0; i < 3; ++i) samples.row(i) = random_vec(4, rng).transpose();

  CHECK(rotate_samples(samples, MatrixXd::Identity(4, 4)).cwiseEqual(samples).all());

  MatrixXd perm = MatrixXd::Zero(4, 4);
  perm(0, 1) = perm(1, 0) = perm(2, 3) = perm(3, 2) = 1.0;
  const MatrixXd rotated = rotate_samples(samples, perm);
  for (int i = 0; i < 3; ++i) {
    CHECK(rotated(i, 0) == samples(i, 1));
    CHECK(rotated(i, 1) == samples(i, 0));
    CHECK(rotated(i, 2) == samples(i, 3));
    CHECK(rotated(i, 3) == samples(i, 2));
  }

  CHECK_THROWS_AS(rotate_samples(samples, 2.0 * MatrixXd::Identity(4, 4)),
                  InvalidArgument);
}

TEST_CASE("rotate_samples: Haar rotation preserves spiked moments") {
  RngStream rng(16);
  const int d = 6, rows = 100000;
  const MatrixXd u = sample_uniform_projection(d, 2, rng);
  const GaussianPopulation pop(VectorXd::Zero(d), CovarianceModel::spiked(d, 2.0, u));
  const MatrixXd r = sample_uniform_projection(d, d, rng);

  // Two-sample comparison of E||x||^2: independent draws, one batch rotated.
  const MatrixXd a = sample_population(pop, rows, rng);
  const MatrixXd b = rotate_samples(sample_population(pop, rows, rng), r);
  const auto mean_sq_norm = [](const MatrixXd& s, double& mean, double& se) {
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < s.rows(); ++i) {
      const double v = s.row(i).squaredNorm();
      m1 += v;
      m2 += v * v;
    }
    m1 /= double(s.rows());
    m2 /= double(s.rows());
    mean = m1;
    se = std::sqrt(std::max(m2 - m1 * m1, 0.0) / double(s.rows()));
  };
  double ma, sa, mb, sb;
  mean_sq_norm(a, ma, sa);
  mean_sq_norm(b, mb, sb);
  CHECK(std::abs(ma - mb) <= 5.0 * std::sqrt(sa * sa + sb * sb));
}
