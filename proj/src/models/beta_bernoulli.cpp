#include "umcmc/models/beta_bernoulli.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>

namespace umcmc {

namespace {

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

}  // namespace

BetaBernoulliModel::BetaBernoulliModel(double alpha, std::vector<int> y, double eps, std::size_t n_particles,
                                       double beta_lo, double beta_hi)
    : alpha_(alpha), y_(std::move(y)), eps_(eps), n_particles_(n_particles), beta_lo_(beta_lo), beta_hi_(beta_hi) {
  if (!(alpha_ > 0.0)) throw DomainError("Beta-Bernoulli: alpha must be positive");
  if (!(eps_ >= 0.0)) throw DomainError("Beta-Bernoulli: eps must be >= 0");
  if (n_particles_ < 1) throw DomainError("Beta-Bernoulli: need at least one particle");
  if (!(beta_lo_ > 0.0 && beta_lo_ < beta_hi_)) throw DomainError("Beta-Bernoulli: invalid prior interval");
  for (int v : y_) {
    if (v != 0 && v != 1) throw DomainError("Beta-Bernoulli: observations must be 0 or 1");
    ones_ += static_cast<std::size_t>(v);
  }
}

double BetaBernoulliModel::log_prior(const Vector& theta) const {
  const double beta = theta[0];
  if (!(beta >= beta_lo_ && beta <= beta_hi_)) return kNegInfinity;
  return -std::log(beta_hi_ - beta_lo_);
}

double BetaBernoulliModel::exact_log_lik(double beta) const {
  const double T = static_cast<double>(y_.size());
  const double ones = static_cast<double>(ones_);
  return ones * std::log(alpha_) + (T - ones) * std::log(beta) - T * std::log(alpha_ + beta);
}

double BetaBernoulliModel::exact_log_lik(const Vector& theta) const { return exact_log_lik(theta[0]); }

Beta BetaBernoulliModel::proposal_law(int y, double beta) const {
  if (y == 1) return Beta(1.0 + alpha_, beta * (1.0 + eps_));
  return Beta(alpha_ * (1.0 + eps_), 1.0 + beta);
}

double BetaBernoulliModel::log_weight(double x, int y, double beta) const {
  return log_weight_parts(log_weight_base(y, beta), std::log(x), std::log1p(-x), y, beta);
}

double BetaBernoulliModel::log_weight_base(int y, double beta) const {
  const Beta q = proposal_law(y, beta);
  return log_beta_fn(q.a, q.b) - log_beta_fn(alpha_, beta);
}

double BetaBernoulliModel::log_weight_parts(double base, double log_x, double log_1mx, int y, double beta) const {
  if (eps_ == 0.0) return base;
  if (y == 1) return base - eps_ * beta * log_1mx;
  return base - alpha_ * eps_ * log_x;
}

double BetaBernoulliModel::log_lik_hat(const Vector& theta, RngStream& s) const {
  const double beta = theta[0];
  if (eps_ == 0.0) {
    // Every weight equals p(y_t | beta); no draws needed.
    const double T = static_cast<double>(y_.size());
    const double ones = static_cast<double>(ones_);
    return ones * log_weight(0.5, 1, beta) + (T - ones) * log_weight(0.5, 0, beta);
  }
  const Beta q1 = proposal_law(1, beta);
  const Beta q0 = proposal_law(0, beta);
  const double base1 = log_weight_base(1, beta);
  const double base0 = log_weight_base(0, beta);
  const double log_n = std::log(static_cast<double>(n_particles_));
  std::vector<double> lw(n_particles_);
  double total = 0.0;
  for (int obs : y_) {
    const Beta& q = obs == 1 ? q1 : q0;
    const double base = obs == 1 ? base1 : base0;
    for (auto& w : lw) {
      // Beta draw as a ratio of gammas, keeping log x and log(1 - x) accurate near 0 and 1.
      const double g1 = standard_gamma(q.a, s);
      const double g2 = standard_gamma(q.b, s);
      const double log_sum = std::log(g1 + g2);
      w = log_weight_parts(base, std::log(g1) - log_sum, std::log(g2) - log_sum, obs, beta);
    }
    total += log_sum_exp(lw.data(), lw.size()) - log_n;
  }
  return total;
}

void BetaBernoulliModel::sample_aux(std::size_t, RngStream& s, double* out) const {
  for (std::size_t i = 0; i < n_particles_; ++i) out[i] = s.uniform();
}

double BetaBernoulliModel::block_log_lik(const Vector& theta, std::size_t t, const double* aux) const {
  const double beta = theta[0];
  const int obs = y_[t];
  if (eps_ == 0.0) return log_weight(0.5, obs, beta);
  const Beta q = proposal_law(obs, beta);
  const double base = log_weight_base(obs, beta);
  std::vector<double> lw(n_particles_);
  for (std::size_t i = 0; i < n_particles_; ++i) {
    double one_minus_x = 0.0;
    const double x = boost::math::ibeta_inv(q.a, q.b, aux[i], &one_minus_x);
    lw[i] = log_weight_parts(base, std::log(x), std::log(one_minus_x), obs, beta);
  }
  return log_sum_exp(lw.data(), lw.size()) - std::log(static_cast<double>(n_particles_));
}

InitialSampler BetaBernoulliModel::prior_init() const {
  return independent_init({Uniform(beta_lo_, beta_hi_)});
}

std::vector<int> BetaBernoulliModel::simulate(double alpha, double beta, std::size_t T, RngStream& s) {
  const Beta latent(alpha, beta);
  std::vector<int> y(T);
  for (auto& v : y) {
    const double x = sample(latent, s);
    v = s.uniform() < x ? 1 : 0;
  }
  return y;
}

double bb_log_lik_hat(double beta, const BetaBernoulliModel& model, RngStream& s) {
  return model.log_lik_hat(Vector::Constant(1, beta), s);
}

}  // namespace umcmc
