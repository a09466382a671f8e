#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "umcmc/distributions.hpp"
#include "umcmc/rng.hpp"

namespace umcmc {

/// Scalar-state model X_0 ~ mu, X_t | x ~ f(. | x), Y_t | x ~ g(y_t | x).
/// `log_observation(theta, t, x)` scores y_{t+1} for t = 0..horizon()-1.
template <class M>
concept ScalarStateSpaceModel = requires(const M& m, const Vector& theta, RngStream& s, double x, std::size_t t) {
  { m.horizon() } -> std::convertible_to<std::size_t>;
  { m.sample_initial(theta, s) } -> std::convertible_to<double>;
  { m.sample_transition(theta, x, s) } -> std::convertible_to<double>;
  { m.log_observation(theta, t, x) } -> std::convertible_to<double>;
};

/// Multinomial resampling: `count` ancestor indices drawn from normalised weights.
void multinomial_resample(const std::vector<double>& weights, RngStream& s, std::vector<std::size_t>& ancestors);

/// Bootstrap particle filter estimate of log p(y_{1:T} | theta).
///
/// The exponential of the returned value is an unbiased estimator of the
/// likelihood. Returns -inf if every weight vanishes at some time step.
template <ScalarStateSpaceModel M>
double bootstrap_pf_log_lik(const M& model, const Vector& theta, std::size_t n_particles, RngStream& s) {
  if (n_particles < 2) throw std::invalid_argument("bootstrap PF: requires at least two particles");
  const std::size_t horizon = model.horizon();
  const double log_n = std::log(static_cast<double>(n_particles));

  std::vector<double> particles(n_particles);
  std::vector<double> scratch(n_particles);
  std::vector<double> log_w(n_particles);
  std::vector<double> weights(n_particles);
  std::vector<std::size_t> ancestors(n_particles);

  for (auto& x : particles) x = model.sample_initial(theta, s);
  double total = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    if (t > 0) {
      multinomial_resample(weights, s, ancestors);
      for (std::size_t i = 0; i < n_particles; ++i) scratch[i] = particles[ancestors[i]];
      particles.swap(scratch);
    }
    for (auto& x : particles) x = model.sample_transition(theta, x, s);
    for (std::size_t i = 0; i < n_particles; ++i) log_w[i] = model.log_observation(theta, t, particles[i]);
    const double lse = log_sum_exp(log_w.data(), n_particles);
    if (lse == -std::numeric_limits<double>::infinity()) return lse;
    total += lse - log_n;
    for (std::size_t i = 0; i < n_particles; ++i) weights[i] = std::exp(log_w[i] - lse);
  }
  return total;
}

}  // namespace umcmc
