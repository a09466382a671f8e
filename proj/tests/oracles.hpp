#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "umcmc/models/ising.hpp"

namespace testing {

/// Posterior mean of beta under a uniform prior on [lo, hi] and the
/// Beta-Bernoulli marginal likelihood alpha^{T1} beta^{T0} / (alpha + beta)^T.
inline double bb_posterior_mean(double alpha, const std::vector<int>& y, double lo, double hi) {
  double ones = 0.0;
  for (int v : y) ones += v;
  const double zeros = static_cast<double>(y.size()) - ones;
  const double T = static_cast<double>(y.size());
  auto log_lik = [&](double b) { return ones * std::log(alpha) + zeros * std::log(b) - T * std::log(alpha + b); };
  // Normalise by the maximum on a grid to avoid underflow.
  double peak = -1e300;
  for (int i = 0; i <= 1000; ++i) peak = std::max(peak, log_lik(lo + (hi - lo) * i / 1000.0));
  using Q = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double z = Q::integrate([&](double b) { return std::exp(log_lik(b) - peak); }, lo, hi, 15, 1e-14);
  const double m = Q::integrate([&](double b) { return b * std::exp(log_lik(b) - peak); }, lo, hi, 15, 1e-14);
  return m / z;
}

/// Posterior of beta given an observed Ising lattice under U[0, beta_max], by
/// enumerating the density of states for the partition function.
struct IsingPosterior {
  std::map<long, double> dos;
  long observed_sum = 0;
  double beta_max = 0.0;

  IsingPosterior(const umcmc::IsingLattice& y, double beta_max_)
      : dos(umcmc::ising_density_of_states(y.side)), observed_sum(umcmc::ising_interaction_sum(y)),
        beta_max(beta_max_) {}

  double log_unnorm(double b) const {
    return b * static_cast<double>(observed_sum) - umcmc::ising_log_partition(dos, b);
  }

  /// Probability mass per bin of width beta_max / bins, and the mean.
  std::vector<double> bin_masses(int bins, double* mean = nullptr) const {
    using Q = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double ref = log_unnorm(0.5 * beta_max);
    std::vector<double> mass(bins);
    double total = 0.0, first = 0.0;
    for (int i = 0; i < bins; ++i) {
      const double a = beta_max * i / bins, b = beta_max * (i + 1) / bins;
      mass[i] = Q::integrate([&](double x) { return std::exp(log_unnorm(x) - ref); }, a, b, 5, 1e-13);
      first += Q::integrate([&](double x) { return x * std::exp(log_unnorm(x) - ref); }, a, b, 5, 1e-13);
      total += mass[i];
    }
    for (auto& v : mass) v /= total;
    if (mean) *mean = first / total;
    return mass;
  }
};

}  // namespace testing
