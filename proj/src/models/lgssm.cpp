#include "umcmc/models/lgssm.hpp"

#include <cmath>

namespace umcmc {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
}

LinearGaussianSSM::LinearGaussianSSM(std::vector<double> y, std::size_t n_particles)
    : y_(std::move(y)), n_particles_(n_particles) {
  if (y_.empty()) throw DomainError("LGSSM: empty data");
  if (n_particles_ < 2) throw DomainError("LGSSM: need at least two particles");
}

double LinearGaussianSSM::log_prior(const Vector& theta) const {
  const double a = log_density(Uniform(0.0, 1.0), theta[0]);
  if (!std::isfinite(a) || !(theta[1] > 0.0)) return kNegInfinity;
  return a + log_density(Gamma(2.0, 2.0), theta[1]);
}

double LinearGaussianSSM::exact_log_lik(const Vector& theta) const { return kalman_log_lik(theta[0], theta[1], y_); }

double LinearGaussianSSM::log_lik_hat(const Vector& theta, RngStream& s) const {
  return bootstrap_pf_log_lik(*this, theta, n_particles_, s);
}

double LinearGaussianSSM::log_observation(const Vector&, std::size_t t, double x) const {
  const double r = y_[t] - x;
  return -0.5 * (kLogTwoPi + r * r);
}

std::vector<double> LinearGaussianSSM::simulate(double a, double sigma_x, std::size_t T, RngStream& s) {
  std::vector<double> y(T);
  double x = s.normal();
  for (auto& obs : y) {
    x = a * x + sigma_x * s.normal();
    obs = x + s.normal();
  }
  return y;
}

double kalman_log_lik(double a, double sigma_x, std::span<const double> y) {
  if (!(sigma_x > 0.0)) throw DomainError("kalman_log_lik: sigma_x must be positive");
  const double q = sigma_x * sigma_x;
  double mean = 0.0;
  double var = 1.0;
  double total = 0.0;
  for (double obs : y) {
    mean = a * mean;
    var = a * a * var + q;
    const double s = var + 1.0;
    const double r = obs - mean;
    total += -0.5 * (kLogTwoPi + std::log(s) + r * r / s);
    const double gain = var / s;
    mean += gain * r;
    var = (1.0 - gain) * var;
  }
  return total;
}

}  // namespace umcmc
