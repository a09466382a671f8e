#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "umcmc/distributions.hpp"
#include "umcmc/kernels.hpp"
#include "umcmc/models/particle_filter.hpp"

namespace umcmc {

/// X_0 ~ N(0, 1), X_t | x ~ N(a x, sigma_x^2), Y_t | x ~ N(x, 1);
/// theta = (a, sigma_x) with a ~ U[0, 1] and sigma_x ~ Gamma(2, rate 2).
class LinearGaussianSSM {
 public:
  LinearGaussianSSM(std::vector<double> y, std::size_t n_particles = 100);

  double log_prior(const Vector& theta) const;
  double exact_log_lik(const Vector& theta) const;
  double log_lik_hat(const Vector& theta, RngStream& s) const;

  std::size_t horizon() const { return y_.size(); }
  double sample_initial(const Vector&, RngStream& s) const { return s.normal(); }
  double sample_transition(const Vector& theta, double x, RngStream& s) const {
    return theta[0] * x + theta[1] * s.normal();
  }
  double log_observation(const Vector& theta, std::size_t t, double x) const;

  const std::vector<double>& data() const { return y_; }
  std::size_t n_particles() const { return n_particles_; }

  static std::vector<double> simulate(double a, double sigma_x, std::size_t T, RngStream& s);

 private:
  std::vector<double> y_;
  std::size_t n_particles_;
};

/// Exact log p(y_{1:T} | a, sigma_x) by the Kalman predict/update recursion.
double kalman_log_lik(double a, double sigma_x, std::span<const double> y);

}  // namespace umcmc
