#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mialab/gaussians.hpp"

namespace mialab {

enum class Hypothesis { Null, Alt };

// One instance of the spiked-deficient testing family: under Null the
// covariance is I_d; under Alt it is Sigma_v = I_d - vv^T + (1/(31d)) vv^T
// for a uniform unit direction v. The Alt sampler applies the rank-one
// deflation directly and never materializes Sigma_v.
struct HardInstance {
  Hypothesis hypothesis = Hypothesis::Null;
  VectorXd v;  // unit norm; present only under Alt
  int dim = 0;

  VectorXd sample(RngStream& rng) const;
  MatrixXd sample_many(int count, RngStream& rng) const;
  // Dense Sigma; spectrum cross-checks only.
  MatrixXd materialize_cov() const;
};

HardInstance sample_hard_instance(int dim, Hypothesis hypothesis, RngStream& rng);

// Phi = y^T Sigma_hat^{-1} y with the zero-mean empirical second moment
// (the testing family is centered). Requires n >= dim + 1 and unit-norm y.
double estimate_quadratic(const VectorXd& y, const MatrixXd& samples);

// 1 iff estimate_quadratic(y, samples) > 1.75.
int reduction_tester(const VectorXd& y, const MatrixXd& samples);

struct IngsterBounds {
  // E[(1 - <v1,v2>^2)^{-n/2}] = B(1/2, (d-n-1)/2) / B(1/2, (d-1)/2).
  double chi2_mixture_bound = 0.0;
  // (1/2) sqrt((n+1)/(d-n-1)).
  double tv_bound = 0.0;
};

// Requires d > n + 1 so the mixture integral exists. The Beta ratio is
// evaluated through log-Gamma differences to stay finite at large d.
IngsterBounds ingster_bounds(int n, int d);

// Fraction of uniform directions v with 1 + (31 dim - 1) <v, e1>^2 >= 4.
double lb_norm_check(int dim, int trials, RngStream& rng);

struct HardnessCheck {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

// The suite the CLI prints: the lb_norm fraction, the chi-square mixture
// identity at three (n, d) points, the half-accuracy rate of the empirical
// estimator under both hypotheses, and the tester's advantage against the
// TV barrier in the too-few-samples regime.
std::vector<HardnessCheck> run_hardness_suite(std::uint64_t seed);

}  // namespace mialab
