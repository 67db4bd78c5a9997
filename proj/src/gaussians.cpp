#include "mialab/gaussians.hpp"

#include <cmath>

namespace mialab {

namespace {

VectorXd gauss_vector(int n, RngStream& rng) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.next_gauss();
  return v;
}

}  // namespace

CovarianceModel CovarianceModel::identity(int dim) {
  if (dim <= 0) throw InvalidArgument("covariance dimension must be positive");
  return CovarianceModel(Kind::Identity, dim);
}

CovarianceModel CovarianceModel::dense(MatrixXd matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw InvalidArgument("dense covariance must be square and nonempty");
  const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw FactorizationError("dense covariance is not symmetric");
  CovarianceModel m(Kind::Dense, int(matrix.rows()));
  m.dense_ = std::move(matrix);
  m.llt_.compute(m.dense_);
  if (m.llt_.info() != Eigen::Success)
    throw FactorizationError("dense covariance is not positive definite");
  return m;
}

CovarianceModel CovarianceModel::spiked(int dim, double sigma2, MatrixXd basis) {
  if (dim <= 0) throw InvalidArgument("covariance dimension must be positive");
  const int k = int(basis.cols());
  if (basis.rows() != dim || k < 1 || k > dim)
    throw InvalidArgument("spiked basis must be dim x k with 1 <= k <= dim");
  if (sigma2 <= 0.0) throw InvalidArgument("spiked sigma2 must be positive");
  const double ortho =
      (basis.transpose() * basis - MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
  if (ortho > 1e-10)
    throw InvalidArgument("spiked basis is not column-orthonormal");
  CovarianceModel m(Kind::Spiked, dim);
  m.sigma2_ = sigma2;
  m.basis_ = std::move(basis);
  return m;
}

MatrixXd CovarianceModel::materialize() const {
  switch (kind_) {
    case Kind::Identity:
      return MatrixXd::Identity(dim_, dim_);
    case Kind::Dense:
      return dense_;
    case Kind::Spiked:
      return MatrixXd::Identity(dim_, dim_) + sigma2_ * basis_ * basis_.transpose();
  }
  throw Error("unreachable");
}

VectorXd CovarianceModel::sample_centered(RngStream& rng) const {
  switch (kind_) {
    case Kind::Identity:
      return gauss_vector(dim_, rng);
    case Kind::Dense: {
      return llt_.matrixL() * gauss_vector(dim_, rng);
    }
    case Kind::Spiked: {
      // z + sigma * U w, z ~ N(0, I_d), w ~ N(0, I_k)
      VectorXd z = gauss_vector(dim_, rng);
      VectorXd w = gauss_vector(int(basis_.cols()), rng);
      z.noalias() += std::sqrt(sigma2_) * (basis_ * w);
      return z;
    }
  }
  throw Error("unreachable");
}

double CovarianceModel::quad_form_inverse(const VectorXd& y) const {
  return quad_form_inverse(y, y);
}

double CovarianceModel::quad_form_inverse(const VectorXd& x, const VectorXd& y) const {
  if (x.size() != dim_ || y.size() != dim_)
    throw InvalidArgument("quad_form_inverse: vector length does not match dimension");
  switch (kind_) {
    case Kind::Identity:
      return x.dot(y);
    case Kind::Dense:
      return x.dot(llt_.solve(y));
    case Kind::Spiked: {
      // Sigma^{-1} = I - sigma2/(1+sigma2) U U^T  (Sherman-Morrison)
      const VectorXd ux = basis_.transpose() * x;
      const VectorXd uy = basis_.transpose() * y;
      return x.dot(y) - sigma2_ / (1.0 + sigma2_) * ux.dot(uy);
    }
  }
  throw Error("unreachable");
}

double CovarianceModel::log_det() const {
  switch (kind_) {
    case Kind::Identity:
      return 0.0;
    case Kind::Dense: {
      const auto& L = llt_.matrixLLT();
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += std::log(L(i, i));
      return 2.0 * s;
    }
    case Kind::Spiked:
      return double(basis_.cols()) * std::log1p(sigma2_);
  }
  throw Error("unreachable");
}

VectorXd CovarianceModel::whiten(const VectorXd& x) const {
  if (x.size() != dim_)
    throw InvalidArgument("whiten: vector length does not match dimension");
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::Dense:
      // L^{-1} x satisfies the bilinear contract since L^{-T} L^{-1} = Sigma^{-1}.
      return llt_.matrixL().solve(x);
    case Kind::Spiked: {
      // Rescale the U-subspace component by 1/sqrt(1+sigma2).
      const VectorXd ux = basis_.transpose() * x;
      return x + (1.0 / std::sqrt(1.0 + sigma2_) - 1.0) * (basis_ * ux);
    }
  }
  throw Error("unreachable");
}

MatrixXd sample_population(const GaussianPopulation& pop, int count, RngStream& rng) {
  if (count < 0) throw InvalidArgument("sample count must be nonnegative");
  MatrixXd out(count, pop.dim());
  for (int i = 0; i < count; ++i)
    out.row(i) = (pop.mean + pop.cov.sample_centered(rng)).transpose();
  return out;
}

MatrixXd sample_uniform_projection(int dim, int k, RngStream& rng) {
  if (k < 1 || k > dim)
    throw InvalidArgument("sample_uniform_projection requires 1 <= k <= dim");
  for (;;) {
    MatrixXd g(dim, k);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < k; ++j) g(i, j) = rng.next_gauss();
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(dim, k);
    const MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    bool deficient = false;
    for (int j = 0; j < k; ++j) {
      const double rj = r(j, j);
      if (std::abs(rj) < 1e-12) { deficient = true; break; }
      if (rj < 0) q.col(j) = -q.col(j);
    }
    if (!deficient) return q;
    // Gaussian matrix is full-rank almost surely; re-draw on the null event.
  }
}

MatrixXd constrained_projection_sample(
    const std::vector<std::pair<VectorXd, VectorXd>>& pairs, int m, RngStream& rng) {
  if (pairs.empty()) throw InvalidArgument("constrained projection needs at least one pair");
  const int d = int(pairs[0].first.size());
  const int n = int(pairs.size());
  if (!(n < m && 2 * m < d))
    throw InvalidArgument("constrained projection requires #pairs < m < dim/2");

  MatrixXd Y(d, n), Z(d, n);
  for (int i = 0; i < n; ++i) {
    const auto& [x, y] = pairs[i];
    if (x.size() != d || y.size() != d)
      throw InvalidArgument("constraint vectors have inconsistent dimensions");
    Y.col(i) = y;
    Z.col(i) = x - y;
  }

  const auto basis_of = [d](const MatrixXd& A) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    const int r = int(qr.rank());
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(d, r);
    return q;
  };

  const MatrixXd v1 = basis_of(Y);   // spans {y_i}
  const MatrixXd vz = basis_of(Z);   // spans {x_i - y_i}
  const int r = int(v1.cols());
  const int s = int(vz.cols());

  if (r > 0 && s > 0 &&
      (v1.transpose() * vz).cwiseAbs().maxCoeff() > 1e-8)
    throw InconsistentConstraints(
        "inconsistent constraints: span{y_i} not orthogonal to span{x_i - y_i}");
  if (m - r < 0 || d - r - s < m - r)
    throw InvalidArgument("projection rank m incompatible with constraint ranks");

  // Orthogonal complement of span{y_i} + span{x_i - y_i}.
  MatrixXd both(d, r + s);
  both << v1, vz;
  Eigen::HouseholderQR<MatrixXd> qr(both);
  const MatrixXd full_q = qr.householderQ() * MatrixXd::Identity(d, d);
  const MatrixXd v2 = full_q.rightCols(d - r - s);

  MatrixXd pi = MatrixXd::Zero(d, d);
  if (r > 0) pi.noalias() += v1 * v1.transpose();
  if (m - r > 0) {
    const MatrixXd u = sample_uniform_projection(d - r - s, m - r, rng);
    const MatrixXd v2u = v2 * u;
    pi.noalias() += v2u * v2u.transpose();
  }
  return pi;
}

MatrixXd rotate_samples(const MatrixXd& samples, const MatrixXd& rotation) {
  const int d = int(rotation.rows());
  if (rotation.cols() != d || samples.cols() != d)
    throw InvalidArgument("rotate_samples: dimension mismatch");
  const double ortho =
      (rotation.transpose() * rotation - MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
  if (ortho > 1e-8)
    throw InvalidArgument("rotate_samples: matrix is not orthogonal");
  return samples * rotation.transpose();
}

}  // namespace mialab
