#pragma once

#include "umcmc/distributions.hpp"
#include "umcmc/kernels.hpp"
#include "umcmc/rng.hpp"

namespace umcmc {

/// Target N(mu, I) observed only through pi(theta) * W with
/// log W ~ N(-sigma^2 / 2, sigma^2), so E[W] = 1.
class ToyNoisyNormal {
 public:
  explicit ToyNoisyNormal(Vector mu = default_mean(), double sigma_noise = 0.0);

  static Vector default_mean() { return (Vector(2) << 1.0, 2.0).finished(); }

  /// Flat: the whole target sits in the "likelihood".
  double log_prior(const Vector&) const { return 0.0; }
  double exact_log_lik(const Vector& theta) const;
  /// Consumes no randomness when sigma_noise == 0.
  double log_lik_hat(const Vector& theta, RngStream& s) const;

  const Vector& mu() const { return mu_; }
  double sigma_noise() const { return sigma_; }

  /// Uniform over the unit hypercube.
  InitialSampler default_init() const;

 private:
  Vector mu_;
  double sigma_;
};

double toy_log_lik_hat(const Vector& theta, const ToyNoisyNormal& model, RngStream& s);

}  // namespace umcmc
