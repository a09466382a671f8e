#pragma once

#include <cstddef>
#include <vector>

#include "umcmc/distributions.hpp"
#include "umcmc/kernels.hpp"
#include "umcmc/rng.hpp"

namespace umcmc {

/// Random-effects model X_t ~ Beta(alpha, beta), Y_t | x ~ Bernoulli(x), with
/// alpha fixed and theta = (beta). Each p(y_t | beta) is estimated by
/// importance sampling from a tilted Beta proposal controlled by eps.
class BetaBernoulliModel {
 public:
  BetaBernoulliModel(double alpha, std::vector<int> y, double eps, std::size_t n_particles, double beta_lo = 0.1,
                     double beta_hi = 10.0);

  double log_prior(const Vector& theta) const;
  double exact_log_lik(const Vector& theta) const;
  double exact_log_lik(double beta) const;

  /// Fresh importance-sampling estimate of log p(y | beta).
  double log_lik_hat(const Vector& theta, RngStream& s) const;

  /// Importance proposal q_beta(. | y).
  Beta proposal_law(int y, double beta) const;
  /// log omega(x, y) = log g(y|x) f_beta(x) / q_beta(x|y), in closed form.
  double log_weight(double x, int y, double beta) const;

  // Block interface: U_t is N uniforms, mapped through the proposal quantile.
  std::size_t num_blocks() const { return y_.size(); }
  std::size_t aux_dim() const { return n_particles_; }
  void sample_aux(std::size_t t, RngStream& s, double* out) const;
  double block_log_lik(const Vector& theta, std::size_t t, const double* aux) const;

  double alpha() const { return alpha_; }
  double eps() const { return eps_; }
  std::size_t n_particles() const { return n_particles_; }
  const std::vector<int>& data() const { return y_; }
  std::size_t ones() const { return ones_; }
  double beta_lo() const { return beta_lo_; }
  double beta_hi() const { return beta_hi_; }

  /// Uniform over the prior interval.
  InitialSampler prior_init() const;

  /// y_t drawn from the generative process at (alpha, beta).
  static std::vector<int> simulate(double alpha, double beta, std::size_t T, RngStream& s);

 private:
  double log_weight_base(int y, double beta) const;
  double log_weight_parts(double base, double log_x, double log_1mx, int y, double beta) const;

  double alpha_;
  std::vector<int> y_;
  double eps_;
  std::size_t n_particles_;
  double beta_lo_;
  double beta_hi_;
  std::size_t ones_ = 0;
};

double bb_log_lik_hat(double beta, const BetaBernoulliModel& model, RngStream& s);

}  // namespace umcmc
