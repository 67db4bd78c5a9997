#include "mialab/hardness.hpp"

#include <cmath>

#include "mialab/mechanisms.hpp"

namespace mialab {

namespace {

VectorXd random_unit(int d, RngStream& rng) {
  VectorXd v(d);
  for (;;) {
    for (int i = 0; i < d; ++i) v[i] = rng.next_gauss();
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

}  // namespace

VectorXd HardInstance::sample(RngStream& rng) const {
  VectorXd z(dim);
  for (int i = 0; i < dim; ++i) z[i] = rng.next_gauss();
  if (hypothesis == Hypothesis::Alt) {
    // Shrink the v-component to standard deviation 1/sqrt(31 d).
    const double shrink = 1.0 - 1.0 / std::sqrt(31.0 * dim);
    z -= shrink * v.dot(z) * v;
  }
  return z;
}

MatrixXd HardInstance::sample_many(int count, RngStream& rng) const {
  MatrixXd out(count, dim);
  for (int i = 0; i < count; ++i) out.row(i) = sample(rng).transpose();
  return out;
}

MatrixXd HardInstance::materialize_cov() const {
  MatrixXd cov = MatrixXd::Identity(dim, dim);
  if (hypothesis == Hypothesis::Alt)
    cov -= (1.0 - 1.0 / (31.0 * dim)) * v * v.transpose();
  return cov;
}

HardInstance sample_hard_instance(int dim, Hypothesis hypothesis, RngStream& rng) {
  if (dim < 7) throw InvalidArgument("sample_hard_instance requires dim >= 7");
  HardInstance inst;
  inst.hypothesis = hypothesis;
  inst.dim = dim;
  if (hypothesis == Hypothesis::Alt) inst.v = random_unit(dim, rng);
  return inst;
}

double estimate_quadratic(const VectorXd& y, const MatrixXd& samples) {
  const int d = int(samples.cols());
  if (y.size() != d) throw InvalidArgument("estimate_quadratic: dimension mismatch");
  if (std::abs(y.norm() - 1.0) > 1e-8)
    throw InvalidArgument("estimate_quadratic requires a unit-norm direction");
  if (samples.rows() < d + 1)
    throw InvalidArgument("estimate_quadratic needs at least dim + 1 samples");
  const PrecisionEstimate prec = empirical_precision(samples, true);
  return prec.quad(y, y);
}

int reduction_tester(const VectorXd& y, const MatrixXd& samples) {
  return estimate_quadratic(y, samples) > 1.75 ? 1 : 0;
}

IngsterBounds ingster_bounds(int n, int d) {
  if (n < 0) throw InvalidArgument("ingster_bounds needs n >= 0");
  if (d <= n + 1)
    throw InvalidArgument("ingster_bounds requires d > n + 1 for the mixture integral");
  IngsterBounds b;
  b.chi2_mixture_bound =
      std::exp(std::lgamma(0.5 * (d - n - 1)) + std::lgamma(0.5 * d) -
               std::lgamma(0.5 * (d - n)) - std::lgamma(0.5 * (d - 1)));
  b.tv_bound = 0.5 * std::sqrt(double(n + 1) / double(d - n - 1));
  return b;
}

double lb_norm_check(int dim, int trials, RngStream& rng) {
  if (dim < 7) throw InvalidArgument("lb_norm_check requires dim >= 7");
  if (trials < 1) throw InvalidArgument("lb_norm_check needs trials >= 1");
  long long hits = 0;
  for (int t = 0; t < trials; ++t) {
    const VectorXd v = random_unit(dim, rng);
    const double quad = 1.0 + (31.0 * dim - 1.0) * v[0] * v[0];
    if (quad >= 4.0) ++hits;
  }
  return double(hits) / double(trials);
}

namespace {

// Phi via the pseudo-inverse of the empirical second moment, for the
// too-few-samples regime where the plain estimator is singular. The TV
// barrier applies to any tester, so this is a valid stand-in.
double pinv_quadratic(const VectorXd& y, const MatrixXd& samples) {
  const int d = int(samples.cols());
  MatrixXd sigma_hat = MatrixXd::Zero(d, d);
  sigma_hat.selfadjointView<Eigen::Lower>().rankUpdate(
      samples.transpose(), 1.0 / double(samples.rows()));
  sigma_hat = sigma_hat.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sigma_hat);
  const double cutoff = 1e-10 * std::max(1.0, eig.eigenvalues().maxCoeff());
  double quad = 0.0;
  for (int i = 0; i < d; ++i) {
    if (eig.eigenvalues()[i] <= cutoff) continue;
    const double proj = eig.eigenvectors().col(i).dot(y);
    quad += proj * proj / eig.eigenvalues()[i];
  }
  return quad;
}

}  // namespace

std::vector<HardnessCheck> run_hardness_suite(std::uint64_t seed) {
  RngStream root(seed);
  std::vector<HardnessCheck> out;

  {
    // Direction-norm lower bound: fraction with y^T Sigma_v^{-1} y >= 4.
    const int trials = 10000;
    RngStream rng = root.substream(1);
    HardnessCheck c;
    c.name = "lb-norm-fraction(d=7)";
    c.measured = lb_norm_check(7, trials, rng);
    c.threshold = 0.6 - 3.0 * std::sqrt(0.6 * 0.4 / double(trials));
    c.pass = c.measured >= c.threshold;
    c.note = "fraction must stay above 3/5 minus binomial slack";
    out.push_back(c);
  }

  {
    // Chi-square mixture identity E[(1 - <v1,v2>^2)^{-n/2}] = Beta ratio.
    const int pairs = 100000;
    const std::pair<int, int> points[] = {{2, 10}, {4, 20}, {8, 40}};
    int idx = 0;
    for (const auto& [n, d] : points) {
      RngStream rng = root.substream(10 + idx++);
      double mean = 0.0, sq = 0.0;
      for (int t = 0; t < pairs; ++t) {
        const VectorXd v1 = random_unit(d, rng);
        const VectorXd v2 = random_unit(d, rng);
        const double ip = v1.dot(v2);
        const double val = std::pow(1.0 - ip * ip, -0.5 * n);
        mean += val;
        sq += val * val;
      }
      mean /= pairs;
      sq /= pairs;
      const double se = std::sqrt(std::max(sq - mean * mean, 0.0) / double(pairs));
      HardnessCheck c;
      c.name = "ingster-identity(n=" + std::to_string(n) + ",d=" + std::to_string(d) + ")";
      c.measured = mean;
      c.threshold = ingster_bounds(n, d).chi2_mixture_bound;
      c.pass = std::abs(c.measured - c.threshold) <= 5.0 * se;
      c.note = "Monte Carlo vs Beta-ratio closed form, 5 stderr";
      out.push_back(c);
    }
  }

  {
    // Half-accuracy rate of the empirical estimator in the sample-rich
    // regime (n = 16 d), under both hypotheses.
    const int d = 50, n = 800, trials = 200;
    for (const Hypothesis h : {Hypothesis::Null, Hypothesis::Alt}) {
      RngStream rng = root.substream(h == Hypothesis::Null ? 20 : 21);
      VectorXd y = VectorXd::Zero(d);
      y[0] = 1.0;
      int ok = 0;
      for (int t = 0; t < trials; ++t) {
        const HardInstance inst = sample_hard_instance(d, h, rng);
        const MatrixXd samples = inst.sample_many(n, rng);
        const double truth =
            h == Hypothesis::Null
                ? 1.0
                : 1.0 + (31.0 * d - 1.0) * inst.v[0] * inst.v[0];
        const double phi = estimate_quadratic(y, samples);
        if (phi >= 0.5 * truth && phi <= 1.5 * truth) ++ok;
      }
      HardnessCheck c;
      c.name = std::string("estimator-accuracy(") +
               (h == Hypothesis::Null ? "null" : "alt") + ",d=50,n=800)";
      c.measured = double(ok) / double(trials);
      c.threshold = 0.90;
      c.pass = c.measured >= c.threshold;
      c.note = "rate of Phi within [1/2, 3/2] of the true quadratic";
      out.push_back(c);
    }
  }

  {
    // Tester advantage against the TV barrier with far too few samples
    // (n = d/4). The plain estimator is singular here, so the tester runs on
    // the pseudo-inverse quadratic; the barrier applies to any tester.
    const int d = 50, n = 12, trials = 400;
    RngStream rng = root.substream(30);
    VectorXd y = VectorXd::Zero(d);
    y[0] = 1.0;
    int null_hits = 0, alt_hits = 0;
    for (int t = 0; t < trials; ++t) {
      const HardInstance null_inst = sample_hard_instance(d, Hypothesis::Null, rng);
      if (pinv_quadratic(y, null_inst.sample_many(n, rng)) > 1.75) ++null_hits;
      const HardInstance alt_inst = sample_hard_instance(d, Hypothesis::Alt, rng);
      if (pinv_quadratic(y, alt_inst.sample_many(n, rng)) > 1.75) ++alt_hits;
    }
    HardnessCheck c;
    c.name = "reduction-advantage(d=50,n=12)";
    c.measured = std::abs(double(alt_hits) - double(null_hits)) / double(trials);
    c.threshold = 2.0 * ingster_bounds(n, d).tv_bound +
                  3.0 * std::sqrt(1.0 / double(trials));
    c.pass = c.measured <= c.threshold;
    c.note = "distinguishing advantage vs twice the mixture TV bound";
    out.push_back(c);
  }

  return out;
}

}  // namespace mialab
