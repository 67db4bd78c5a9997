#pragma once

#include <optional>
#include <utility>

#include "mialab/attacks.hpp"
#include "mialab/gaussians.hpp"
#include "mialab/mechanisms.hpp"

namespace mialab {

// What an attack is allowed to see: auxiliary samples, the released estimate,
// and the target point. Never the hidden truth, never the population.
struct AttackView {
  const MatrixXd& aux;
  const ReleasedEstimate& released;
  const VectorXd& target;
};

// Parameters of the spiked-covariance hard instance generator.
struct SpikedParams {
  int n = 0;
  int d = 0;
  int k = 0;
  int m = 0;
  double sigma2 = 0.0;
  double rho = 0.0;
};

// One round of the membership game. The truth flag is exposed only to the
// evaluation harness via truth(); attack code paths receive attack_view().
// The generating population backs the informed baseline attacker.
class MiaChallenge {
public:
  MiaChallenge(MatrixXd aux, ReleasedEstimate released, VectorXd target,
               Membership truth, GaussianPopulation population)
      : aux_(std::move(aux)), released_(std::move(released)),
        target_(std::move(target)), truth_(truth),
        population_(std::move(population)) {}

  AttackView attack_view() const { return AttackView{aux_, released_, target_}; }
  Membership truth() const { return truth_; }
  // Informed-attacker side channel: the true generating population.
  const GaussianPopulation& population() const { return population_; }

  const MatrixXd& aux() const { return aux_; }
  const ReleasedEstimate& released() const { return released_; }
  const VectorXd& target() const { return target_; }

private:
  MatrixXd aux_;
  ReleasedEstimate released_;
  VectorXd target_;
  Membership truth_;
  GaussianPopulation population_;
};

// Standard game: draw X_0..X_n, Y_1..Y_m i.i.d. from pop, release the noisy
// empirical mean of X_1..X_n, target X_1 (IN) or X_0 (OUT).
MiaChallenge generate_standard_challenge(const GaussianPopulation& pop, int n, int m,
                                         double rho, Membership truth, RngStream& rng);

// Spiked game: fresh Haar subspace U per call, Sigma = I + sigma2 U U^T,
// mu = 0. The two returned challenges share identical aux and released
// estimate (mu_hat_0 = mu_hat_1); targets are X_0 and X_1.
std::pair<MiaChallenge, MiaChallenge> generate_spiked_challenge(const SpikedParams& p,
                                                                RngStream& rng);

// Per-condition checklist for the parameter regime of the spiked lower bound.
struct LbParameterReport {
  bool sample_budget_ok = false;    // 400 m <= n + n^2 rho^2
  bool directions_ok = false;       // k == m + n_dir
  bool variance_ok = false;         // sigma2 >= c_dim * d
  bool dimension_ok = false;        // d >= c_dim * (n + n^2 rho^2)
  bool all_ok = false;
};

LbParameterReport lb_parameter_check(const SpikedParams& p, double c_dim, int n_dir);

}  // namespace mialab
