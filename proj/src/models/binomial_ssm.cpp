#include "umcmc/models/binomial_ssm.hpp"

#include <cmath>

namespace umcmc {

BinomialSSM::BinomialSSM(std::vector<int> y, int trials, std::size_t n_particles)
    : y_(std::move(y)), trials_(trials), n_particles_(n_particles) {
  if (y_.empty()) throw DomainError("binomial SSM: empty data");
  if (trials_ < 1) throw DomainError("binomial SSM: trials must be >= 1");
  if (n_particles_ < 2) throw DomainError("binomial SSM: need at least two particles");
  const double m = trials_;
  log_choose_.reserve(y_.size());
  for (int v : y_) {
    if (v < 0 || v > trials_) throw DomainError("binomial SSM: counts must lie in [0, M]");
    log_choose_.push_back(std::lgamma(m + 1.0) - std::lgamma(v + 1.0) - std::lgamma(m - v + 1.0));
  }
}

double BinomialSSM::log_prior(const Vector& theta) const {
  const double a = log_density(Uniform(0.0, 1.0), theta[0]);
  if (!std::isfinite(a) || !(theta[1] > 0.0)) return kNegInfinity;
  return a + log_density(InverseGamma(1.0, 0.1), theta[1]);
}

double BinomialSSM::log_lik_hat(const Vector& theta, RngStream& s) const {
  return bootstrap_pf_log_lik(*this, theta, n_particles_, s);
}

double BinomialSSM::log_observation(const Vector&, std::size_t t, double x) const {
  // log s(x) = -log1p(exp(-x)), log(1 - s(x)) = -log1p(exp(x)).
  const double log_p = x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
  const double log_q = x >= 0 ? -x - std::log1p(std::exp(-x)) : -std::log1p(std::exp(x));
  const double k = y_[t];
  return log_choose_[t] + k * log_p + (trials_ - k) * log_q;
}

std::vector<int> BinomialSSM::simulate(double a, double sigma2, std::size_t T, int trials, RngStream& s) {
  std::vector<int> y(T);
  double x = s.normal();
  const double sd = std::sqrt(sigma2);
  for (auto& obs : y) {
    x = a * x + sd * s.normal();
    obs = static_cast<int>(sample(Binomial(trials, 1.0 / (1.0 + std::exp(-x))), s));
  }
  return y;
}

}  // namespace umcmc
