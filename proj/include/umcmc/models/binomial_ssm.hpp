#pragma once

#include <cstddef>
#include <vector>

#include "umcmc/distributions.hpp"
#include "umcmc/kernels.hpp"
#include "umcmc/models/particle_filter.hpp"

namespace umcmc {

/// Neuron-activation model: X_0 ~ N(0, 1), X_t | x ~ N(a x, sigma2),
/// Y_t | x ~ Binomial(M, 1 / (1 + exp(-x))); theta = (a, sigma2) with
/// a ~ U[0, 1] and sigma2 ~ InverseGamma(1, 0.1).
class BinomialSSM {
 public:
  BinomialSSM(std::vector<int> y, int trials = 50, std::size_t n_particles = 128);

  double log_prior(const Vector& theta) const;
  double log_lik_hat(const Vector& theta, RngStream& s) const;

  std::size_t horizon() const { return y_.size(); }
  double sample_initial(const Vector&, RngStream& s) const { return s.normal(); }
  double sample_transition(const Vector& theta, double x, RngStream& s) const {
    return theta[0] * x + std::sqrt(theta[1]) * s.normal();
  }
  double log_observation(const Vector& theta, std::size_t t, double x) const;

  const std::vector<int>& data() const { return y_; }
  int trials() const { return trials_; }
  std::size_t n_particles() const { return n_particles_; }

  static std::vector<int> simulate(double a, double sigma2, std::size_t T, int trials, RngStream& s);

 private:
  std::vector<int> y_;
  int trials_;
  std::size_t n_particles_;
  std::vector<double> log_choose_;
};

}  // namespace umcmc
