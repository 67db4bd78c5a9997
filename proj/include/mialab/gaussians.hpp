#pragma once

#include <Eigen/Dense>
#include <memory>
#include <utility>
#include <vector>

#include "mialab/errors.hpp"
#include "mialab/rng.hpp"

namespace mialab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Covariance of a Gaussian population, in one of three forms:
//   Identity(d)                 Sigma = I_d
//   Dense(M)                    Sigma = M, symmetric positive definite
//   Spiked(d, sigma2, U)        Sigma = I_d + sigma2 * U U^T, U column-orthonormal
//
// The spiked form is stored and applied in low-rank form; a dense d x d
// matrix is materialized only on explicit request (cross-check tests).
class CovarianceModel {
public:
  enum class Kind { Identity, Dense, Spiked };

  static CovarianceModel identity(int dim);
  // Throws FactorizationError if `matrix` is not symmetric SPD.
  static CovarianceModel dense(MatrixXd matrix);
  // Throws InvalidArgument if U is not column-orthonormal (max-norm 1e-10).
  static CovarianceModel spiked(int dim, double sigma2, MatrixXd basis);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  int spike_rank() const { return kind_ == Kind::Spiked ? int(basis_.cols()) : 0; }
  double spike_sigma2() const { return sigma2_; }
  const MatrixXd& spike_basis() const { return basis_; }

  // Dense d x d Sigma (materializes the spiked form; test use only at small d).
  MatrixXd materialize() const;

  // One sample of N(0, Sigma). Spiked cost is O(d k) per draw.
  VectorXd sample_centered(RngStream& rng) const;

  // y^T Sigma^{-1} y and the bilinear x^T Sigma^{-1} y. The spiked path uses
  // Sigma^{-1} = I - sigma2/(1+sigma2) U U^T; no dense inverse is ever formed.
  double quad_form_inverse(const VectorXd& y) const;
  double quad_form_inverse(const VectorXd& x, const VectorXd& y) const;

  // log det(Sigma). Spiked: k * log(1+sigma2).
  double log_det() const;

  // W x with W^T W = Sigma^{-1}, so whiten(x).dot(whiten(y)) equals the
  // bilinear quad form. Linear in x.
  VectorXd whiten(const VectorXd& x) const;

private:
  CovarianceModel(Kind kind, int dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  int dim_;
  double sigma2_ = 0.0;
  MatrixXd basis_;                       // Spiked: d x k
  MatrixXd dense_;                       // Dense: d x d
  Eigen::LLT<MatrixXd> llt_;             // Dense factorization
};

// The unknown data distribution D = N(mean, cov).
struct GaussianPopulation {
  VectorXd mean;
  CovarianceModel cov;

  GaussianPopulation(VectorXd mean_in, CovarianceModel cov_in)
      : mean(std::move(mean_in)), cov(std::move(cov_in)) {
    if (mean.size() != cov.dim())
      throw InvalidArgument("population mean length does not match covariance dimension");
  }
  int dim() const { return cov.dim(); }
};

// count i.i.d. rows from N(pop.mean, pop.cov).
MatrixXd sample_population(const GaussianPopulation& pop, int count, RngStream& rng);

// Haar-uniform dim x k column-orthonormal matrix. QR sign convention:
// triangular factor has positive diagonal, for determinism.
MatrixXd sample_uniform_projection(int dim, int k, RngStream& rng);

// Uniform rank-m orthogonal projection Pi with Pi x_i = y_i for all pairs.
// Requires #pairs < m < dim/2 and span{y_i} orthogonal to span{x_i - y_i}.
MatrixXd constrained_projection_sample(
    const std::vector<std::pair<VectorXd, VectorXd>>& pairs, int m, RngStream& rng);

// Each row x replaced by R x. Throws InvalidArgument unless R is orthogonal
// within 1e-8 max-norm.
MatrixXd rotate_samples(const MatrixXd& samples, const MatrixXd& rotation);

}  // namespace mialab
