#include "umcmc/models/toy.hpp"

#include <cmath>

namespace umcmc {

ToyNoisyNormal::ToyNoisyNormal(Vector mu, double sigma_noise) : mu_(std::move(mu)), sigma_(sigma_noise) {
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) throw DomainError("toy model: sigma must be >= 0");
  if (mu_.size() == 0) throw DomainError("toy model: empty mean");
}

double ToyNoisyNormal::exact_log_lik(const Vector& theta) const {
  constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
  return -0.5 * (static_cast<double>(mu_.size()) * kLogTwoPi + (theta - mu_).squaredNorm());
}

double ToyNoisyNormal::log_lik_hat(const Vector& theta, RngStream& s) const {
  const double exact = exact_log_lik(theta);
  if (sigma_ == 0.0) return exact;
  return exact + sample(Normal(-0.5 * sigma_ * sigma_, sigma_), s);
}

InitialSampler ToyNoisyNormal::default_init() const {
  std::vector<Distribution> marginals(static_cast<std::size_t>(mu_.size()), Uniform(0.0, 1.0));
  return independent_init(std::move(marginals));
}

double toy_log_lik_hat(const Vector& theta, const ToyNoisyNormal& model, RngStream& s) {
  return model.log_lik_hat(theta, s);
}

}  // namespace umcmc
