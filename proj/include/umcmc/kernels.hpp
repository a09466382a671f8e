#pragma once

#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "umcmc/coupling.hpp"
#include "umcmc/distributions.hpp"
#include "umcmc/rng.hpp"

namespace umcmc {

/// A chain reached a state the algorithm assumes impossible (e.g. a current
/// state with zero likelihood estimate).
class InvariantViolation : public std::logic_error {
 public:
  explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

inline constexpr double kNegInfinity = -std::numeric_limits<double>::infinity();

/// Symmetric Gaussian random-walk proposal q(. | theta) = N(theta, cov).
class RandomWalkProposal {
 public:
  explicit RandomWalkProposal(Matrix covariance);
  static RandomWalkProposal isotropic(Eigen::Index dim, double sd);
  static RandomWalkProposal diagonal(const Vector& sds);

  /// The proposal law centred at a given point; holds a pointer to `center`.
  struct Centered {
    const RandomWalkProposal* proposal;
    const Vector* center;
  };
  Centered at(const Vector& center) const { return {this, &center}; }

  Vector draw(const Vector& center, RngStream& s) const;
  double log_density(const Vector& center, const Vector& x) const;
  Eigen::Index dim() const { return chol_.rows(); }
  const Matrix& covariance() const { return covariance_; }

 private:
  Matrix covariance_;
  Matrix chol_;
  double log_det_ = 0.0;
};

inline Vector sample(const RandomWalkProposal::Centered& q, RngStream& s) {
  return q.proposal->draw(*q.center, s);
}
inline double log_density(const RandomWalkProposal::Centered& q, const Vector& x) {
  return q.proposal->log_density(*q.center, x);
}

using InitialSampler = std::function<Vector(RngStream&)>;

/// Independent coordinates, each drawn from its own scalar law.
InitialSampler independent_init(std::vector<Distribution> marginals);

/// Draw from `law` until `accept` holds (rejection-based truncation).
InitialSampler truncated_init(Distribution law, std::function<bool(const Vector&)> accept,
                              std::size_t max_tries = 1'000'000);

// ---------------------------------------------------------------------------
// Model contracts.

template <class T>
concept LogTarget = requires(const T& t, const Vector& x) {
  { t.log_target(x) } -> std::convertible_to<double>;
};

/// Prior plus a non-negative unbiased likelihood estimator, in log scale.
template <class M>
concept PseudoMarginalModel = requires(const M& m, const Vector& x, RngStream& s) {
  { m.log_prior(x) } -> std::convertible_to<double>;
  { m.log_lik_hat(x, s) } -> std::convertible_to<double>;
};

/// Likelihood estimate factorising over T blocks, each a deterministic
/// function of (theta, U_t) with U_t ~ m_t independent of theta.
template <class M>
concept BlockModel = requires(const M& m, const Vector& x, RngStream& s, std::size_t t, double* aux) {
  { m.log_prior(x) } -> std::convertible_to<double>;
  { m.num_blocks() } -> std::convertible_to<std::size_t>;
  { m.aux_dim() } -> std::convertible_to<std::size_t>;
  m.sample_aux(t, s, aux);
  { m.block_log_lik(x, t, static_cast<const double*>(aux)) } -> std::convertible_to<double>;
};

/// Unnormalised likelihood f(y | theta) with an exact sampler of p(. | theta).
template <class M>
concept ExchangeModel = requires(const M& m, const Vector& x, RngStream& s) {
  typename M::Data;
  { m.log_prior(x) } -> std::convertible_to<double>;
  { m.observed() } -> std::convertible_to<const typename M::Data&>;
  { m.log_unnormalized(m.observed(), x) } -> std::convertible_to<double>;
  { m.simulate(x, s) } -> std::convertible_to<typename M::Data>;
};

/// Exact posterior log-density from a model's prior and closed-form likelihood.
template <class M>
struct ExactPosterior {
  std::shared_ptr<const M> model;
  double log_target(const Vector& theta) const {
    const double lp = model->log_prior(theta);
    if (!std::isfinite(lp)) return kNegInfinity;
    return lp + model->exact_log_lik(theta);
  }
};

namespace detail {
inline void check_proposal_estimate(double log_lik) {
  if (std::isnan(log_lik) || log_lik == std::numeric_limits<double>::infinity()) {
    throw InvariantViolation("likelihood estimate is NaN or infinite");
  }
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Metropolis-Hastings with exact target evaluations.

struct PlainState {
  Vector theta;
  double log_target = kNegInfinity;
  bool operator==(const PlainState& other) const { return theta == other.theta; }
};

template <LogTarget Target>
class MhKernel {
 public:
  using State = PlainState;

  MhKernel(Target target, RandomWalkProposal proposal, InitialSampler init)
      : target_(std::move(target)), proposal_(std::move(proposal)), init_(std::move(init)) {}

  State initial(RngStream& s) const {
    State z{init_(s), 0.0};
    z.log_target = target_.log_target(z.theta);
    if (!std::isfinite(z.log_target)) throw InvariantViolation("MH: initial state has zero target density");
    return z;
  }

  State step(const State& z, RngStream& s) const {
    Vector proposal = proposal_.draw(z.theta, s);
    const double lt = target_.log_target(proposal);
    if (std::log(s.uniform()) < log_alpha(z, lt)) return {std::move(proposal), lt};
    return z;
  }

  std::pair<State, State> coupled_step(const State& z1, const State& z2, RngStream& s) const {
    auto draw = maximal_coupling(proposal_.at(z1.theta), proposal_.at(z2.theta), s);
    const double lt1 = target_.log_target(draw.x);
    const double lt2 = draw.coupled ? lt1 : target_.log_target(draw.y);
    const auto accept = common_uniform_accept(s.uniform(), log_alpha(z1, lt1), log_alpha(z2, lt2));
    State out1 = accept.first ? State{draw.x, lt1} : z1;
    State out2 = accept.second ? State{std::move(draw.y), lt2} : z2;
    return {std::move(out1), std::move(out2)};
  }

  /// log alpha_MH for a proposal with log target `lt` (symmetric q cancels).
  static double log_alpha(const State& z, double lt) {
    if (!std::isfinite(z.log_target)) throw InvariantViolation("MH: current state has zero target density");
    if (lt == kNegInfinity) return kNegInfinity;
    return lt - z.log_target;
  }

  const Target& target() const { return target_; }
  const RandomWalkProposal& proposal() const { return proposal_; }

 private:
  Target target_;
  RandomWalkProposal proposal_;
  InitialSampler init_;
};

// ---------------------------------------------------------------------------
// Pseudo-marginal Metropolis-Hastings.

struct PmState {
  Vector theta;
  double log_prior = kNegInfinity;
  double log_lik_hat = kNegInfinity;
  double log_post() const { return log_prior + log_lik_hat; }
  bool operator==(const PmState& other) const {
    return theta == other.theta && log_lik_hat == other.log_lik_hat;
  }
};

template <PseudoMarginalModel Model>
class PmKernel {
 public:
  using State = PmState;

  PmKernel(std::shared_ptr<const Model> model, RandomWalkProposal proposal, InitialSampler init)
      : model_(std::move(model)), proposal_(std::move(proposal)), init_(std::move(init)) {}

  State initial(RngStream& s) const {
    State z;
    z.theta = init_(s);
    z.log_prior = model_->log_prior(z.theta);
    if (!std::isfinite(z.log_prior)) throw InvariantViolation("PM: initial law not dominated by the prior");
    z.log_lik_hat = model_->log_lik_hat(z.theta, s);
    if (!std::isfinite(z.log_lik_hat)) throw InvariantViolation("PM: initial likelihood estimate is zero");
    return z;
  }

  State step(const State& z, RngStream& s) const {
    State proposal = propose_at(proposal_.draw(z.theta, s), s);
    if (std::log(s.uniform()) < log_alpha(z, proposal)) return proposal;
    return z;
  }

  std::pair<State, State> coupled_step(const State& z1, const State& z2, RngStream& s) const {
    auto draw = maximal_coupling(proposal_.at(z1.theta), proposal_.at(z2.theta), s);
    // One shared estimate on the coupled event, two independent ones otherwise.
    State p1 = propose_at(std::move(draw.x), s);
    State p2 = draw.coupled ? p1 : propose_at(std::move(draw.y), s);
    const auto accept = common_uniform_accept(s.uniform(), log_alpha(z1, p1), log_alpha(z2, p2));
    return {accept.first ? std::move(p1) : z1, accept.second ? std::move(p2) : z2};
  }

  /// log alpha_PM; prior support is checked before any likelihood estimate.
  static double log_alpha(const State& z, const State& proposal) {
    if (!std::isfinite(z.log_lik_hat) || !std::isfinite(z.log_prior)) {
      throw InvariantViolation("PM: current state has zero likelihood estimate");
    }
    if (proposal.log_prior == kNegInfinity || proposal.log_lik_hat == kNegInfinity) return kNegInfinity;
    return proposal.log_post() - z.log_post();
  }

  const Model& model() const { return *model_; }
  const RandomWalkProposal& proposal() const { return proposal_; }

 private:
  State propose_at(Vector theta, RngStream& s) const {
    State p;
    p.theta = std::move(theta);
    p.log_prior = model_->log_prior(p.theta);
    if (std::isfinite(p.log_prior)) {
      p.log_lik_hat = model_->log_lik_hat(p.theta, s);
      detail::check_proposal_estimate(p.log_lik_hat);
    }
    return p;
  }

  std::shared_ptr<const Model> model_;
  RandomWalkProposal proposal_;
  InitialSampler init_;
};

// ---------------------------------------------------------------------------
// Block pseudo-marginal: theta update with the current auxiliary blocks,
// then one refresh attempt per block.

struct BlockPmState {
  Vector theta;
  double log_prior = kNegInfinity;
  std::vector<double> per_obs_log_lik;
  /// Row-major, num_blocks x aux_dim.
  std::vector<double> aux;

  double log_lik() const {
    double total = 0.0;
    for (double v : per_obs_log_lik) total += v;
    return total;
  }
  bool operator==(const BlockPmState& other) const {
    return theta == other.theta && aux == other.aux && per_obs_log_lik == other.per_obs_log_lik;
  }
};

template <BlockModel Model>
class BlockPmKernel {
 public:
  using State = BlockPmState;

  BlockPmKernel(std::shared_ptr<const Model> model, RandomWalkProposal proposal, InitialSampler init)
      : model_(std::move(model)), proposal_(std::move(proposal)), init_(std::move(init)) {}

  State initial(RngStream& s) const {
    State z;
    z.theta = init_(s);
    z.log_prior = model_->log_prior(z.theta);
    if (!std::isfinite(z.log_prior)) throw InvariantViolation("block PM: initial law not dominated by the prior");
    const std::size_t blocks = model_->num_blocks();
    const std::size_t width = model_->aux_dim();
    z.aux.resize(blocks * width);
    for (std::size_t t = 0; t < blocks; ++t) model_->sample_aux(t, s, z.aux.data() + t * width);
    z.per_obs_log_lik = block_values(z.theta, z.aux);
    for (double v : z.per_obs_log_lik) {
      if (!std::isfinite(v)) throw InvariantViolation("block PM: initial block estimate is zero");
    }
    return z;
  }

  State step(const State& z, RngStream& s) const {
    State next = z;
    Vector proposal = proposal_.draw(z.theta, s);
    const double lp = model_->log_prior(proposal);
    std::vector<double> values;
    double log_alpha = kNegInfinity;
    if (std::isfinite(lp)) {
      values = block_values(proposal, z.aux);
      log_alpha = theta_log_alpha(z, lp, values);
    }
    if (std::log(s.uniform()) < log_alpha) {
      next.theta = std::move(proposal);
      next.log_prior = lp;
      next.per_obs_log_lik = std::move(values);
    }
    refresh_blocks(next, nullptr, s);
    return next;
  }

  std::pair<State, State> coupled_step(const State& z1, const State& z2, RngStream& s) const {
    State next1 = z1;
    State next2 = z2;
    auto draw = maximal_coupling(proposal_.at(z1.theta), proposal_.at(z2.theta), s);
    const double lp1 = model_->log_prior(draw.x);
    const double lp2 = draw.coupled ? lp1 : model_->log_prior(draw.y);
    std::vector<double> values1, values2;
    double la1 = kNegInfinity, la2 = kNegInfinity;
    if (std::isfinite(lp1)) {
      values1 = block_values(draw.x, z1.aux);
      la1 = theta_log_alpha(z1, lp1, values1);
    }
    if (std::isfinite(lp2)) {
      values2 = (draw.coupled && z1.aux == z2.aux) ? values1 : block_values(draw.y, z2.aux);
      la2 = theta_log_alpha(z2, lp2, values2);
    }
    const auto accept = common_uniform_accept(s.uniform(), la1, la2);
    if (accept.first) {
      next1.theta = draw.x;
      next1.log_prior = lp1;
      next1.per_obs_log_lik = std::move(values1);
    }
    if (accept.second) {
      next2.theta = std::move(draw.y);
      next2.log_prior = lp2;
      next2.per_obs_log_lik = std::move(values2);
    }
    refresh_blocks(next1, &next2, s);
    return {std::move(next1), std::move(next2)};
  }

  const Model& model() const { return *model_; }
  const RandomWalkProposal& proposal() const { return proposal_; }

 private:
  std::vector<double> block_values(const Vector& theta, const std::vector<double>& aux) const {
    const std::size_t blocks = model_->num_blocks();
    const std::size_t width = model_->aux_dim();
    std::vector<double> values(blocks);
    for (std::size_t t = 0; t < blocks; ++t) {
      values[t] = model_->block_log_lik(theta, t, aux.data() + t * width);
      detail::check_proposal_estimate(values[t]);
    }
    return values;
  }

  static double theta_log_alpha(const State& z, double lp, const std::vector<double>& values) {
    const double current = z.log_lik();
    if (!std::isfinite(current) || !std::isfinite(z.log_prior)) {
      throw InvariantViolation("block PM: current state has zero likelihood estimate");
    }
    double proposed = 0.0;
    for (double v : values) proposed += v;
    if (proposed == kNegInfinity) return kNegInfinity;
    return (lp + proposed) - (z.log_prior + current);
  }

  // Shared proposal U'_t and shared uniform per block when `second` is given.
  void refresh_blocks(State& first, State* second, RngStream& s) const {
    const std::size_t blocks = model_->num_blocks();
    const std::size_t width = model_->aux_dim();
    std::vector<double> fresh(width);
    for (std::size_t t = 0; t < blocks; ++t) {
      model_->sample_aux(t, s, fresh.data());
      const double v1 = model_->block_log_lik(first.theta, t, fresh.data());
      detail::check_proposal_estimate(v1);
      double v2 = kNegInfinity;
      if (second) {
        v2 = (second->theta == first.theta) ? v1 : model_->block_log_lik(second->theta, t, fresh.data());
        detail::check_proposal_estimate(v2);
      }
      const double log_u = std::log(s.uniform());
      if (log_u < block_log_alpha(first.per_obs_log_lik[t], v1)) {
        std::copy(fresh.begin(), fresh.end(), first.aux.begin() + static_cast<std::ptrdiff_t>(t * width));
        first.per_obs_log_lik[t] = v1;
      }
      if (second && log_u < block_log_alpha(second->per_obs_log_lik[t], v2)) {
        std::copy(fresh.begin(), fresh.end(), second->aux.begin() + static_cast<std::ptrdiff_t>(t * width));
        second->per_obs_log_lik[t] = v2;
      }
    }
  }

  static double block_log_alpha(double current, double proposed) {
    if (proposed == kNegInfinity) return kNegInfinity;
    return proposed - current;
  }

  std::shared_ptr<const Model> model_;
  RandomWalkProposal proposal_;
  InitialSampler init_;
};

// ---------------------------------------------------------------------------
// Exchange algorithm for likelihoods with intractable normalising constants.

struct ExchangeState {
  Vector theta;
  double log_prior = kNegInfinity;
  bool operator==(const ExchangeState& other) const { return theta == other.theta; }
};

template <ExchangeModel Model>
class ExchangeKernel {
 public:
  using State = ExchangeState;
  using Data = typename Model::Data;

  ExchangeKernel(std::shared_ptr<const Model> model, RandomWalkProposal proposal, InitialSampler init)
      : model_(std::move(model)), proposal_(std::move(proposal)), init_(std::move(init)) {}

  State initial(RngStream& s) const {
    State z{init_(s), 0.0};
    z.log_prior = model_->log_prior(z.theta);
    if (!std::isfinite(z.log_prior)) throw InvariantViolation("exchange: initial law not dominated by the prior");
    return z;
  }

  State step(const State& z, RngStream& s) const {
    Vector proposal = proposal_.draw(z.theta, s);
    const double lp = model_->log_prior(proposal);
    double la = kNegInfinity;
    if (std::isfinite(lp)) {
      const Data synthetic = model_->simulate(proposal, s);
      la = log_alpha(z, proposal, lp, synthetic);
    }
    if (std::log(s.uniform()) < la) return {std::move(proposal), lp};
    return z;
  }

  std::pair<State, State> coupled_step(const State& z1, const State& z2, RngStream& s) const {
    auto draw = maximal_coupling(proposal_.at(z1.theta), proposal_.at(z2.theta), s);
    const double lp1 = model_->log_prior(draw.x);
    const double lp2 = draw.coupled ? lp1 : model_->log_prior(draw.y);
    double la1 = kNegInfinity, la2 = kNegInfinity;
    if (draw.coupled) {
      if (std::isfinite(lp1)) {
        const Data synthetic = model_->simulate(draw.x, s);
        la1 = log_alpha(z1, draw.x, lp1, synthetic);
        la2 = log_alpha(z2, draw.y, lp2, synthetic);
      }
    } else {
      if (std::isfinite(lp1)) la1 = log_alpha(z1, draw.x, lp1, model_->simulate(draw.x, s));
      if (std::isfinite(lp2)) la2 = log_alpha(z2, draw.y, lp2, model_->simulate(draw.y, s));
    }
    const auto accept = common_uniform_accept(s.uniform(), la1, la2);
    State out1 = accept.first ? State{draw.x, lp1} : z1;
    State out2 = accept.second ? State{std::move(draw.y), lp2} : z2;
    return {std::move(out1), std::move(out2)};
  }

  /// log alpha_EX for proposal theta' with synthetic data Y' ~ p(. | theta').
  double log_alpha(const State& z, const Vector& proposal, double proposal_log_prior,
                   const Data& synthetic) const {
    const Data& y = model_->observed();
    const double numerator =
        model_->log_unnormalized(y, proposal) + proposal_log_prior + model_->log_unnormalized(synthetic, z.theta);
    const double denominator =
        model_->log_unnormalized(y, z.theta) + z.log_prior + model_->log_unnormalized(synthetic, proposal);
    return numerator - denominator;
  }

  const Model& model() const { return *model_; }
  const RandomWalkProposal& proposal() const { return proposal_; }

 private:
  std::shared_ptr<const Model> model_;
  RandomWalkProposal proposal_;
  InitialSampler init_;
};

}  // namespace umcmc
