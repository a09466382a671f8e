#pragma once

#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "umcmc/distributions.hpp"
#include "umcmc/rng.hpp"

namespace umcmc {

/// A kernel bundle usable by the coupled-chain loop: samples the initial
/// law, the single kernel P and the coupled kernel P-bar. States compare
/// with `==`, which must mean "identical" for meeting detection.
template <class K>
concept CoupledChain = requires(const K& kernel, const typename K::State& z, RngStream& s) {
  { kernel.initial(s) } -> std::convertible_to<typename K::State>;
  { kernel.step(z, s) } -> std::convertible_to<typename K::State>;
  { kernel.coupled_step(z, z, s) } -> std::convertible_to<std::pair<typename K::State, typename K::State>>;
  { z == z } -> std::convertible_to<bool>;
};

class CensoredTrajectoryError : public std::runtime_error {
 public:
  explicit CensoredTrajectoryError(const std::string& what) : std::runtime_error(what) {}
};

enum class TrajectoryStatus { met, censored, interrupted };

/// h-evaluations of the lagged pair (Z_n) and (Z~_n) and the meeting time.
///
/// Row n of `first` is h(Z_n) for n = 0..max(m, tau); row n of `second` is
/// h(Z~_n) for n = 0..max(m, tau) - 1. For n >= tau, first(n) == second(n-1).
class CoupledTrajectory {
 public:
  CoupledTrajectory() = default;

  /// Build a met trajectory from explicit h-values (row-major, `dim` columns).
  static CoupledTrajectory from_values(std::size_t k, std::size_t m, std::size_t tau, std::size_t dim,
                                       std::vector<double> h_first, std::vector<double> h_second);

  std::size_t k() const { return k_; }
  std::size_t m() const { return m_; }
  /// Meeting time; only meaningful when `met()`.
  std::size_t tau() const { return tau_; }
  std::size_t dim() const { return dim_; }
  TrajectoryStatus status() const { return status_; }
  bool met() const { return status_ == TrajectoryStatus::met; }
  /// Number of coupled-loop iterations performed (the final n).
  std::size_t iterations() const { return iterations_; }
  /// Cost units actually spent: one per P draw, two per P-bar draw.
  std::uint64_t kernel_calls() const { return kernel_calls_; }

  std::size_t first_size() const { return dim_ ? h_first_.size() / dim_ : 0; }
  std::size_t second_size() const { return dim_ ? h_second_.size() / dim_ : 0; }
  std::span<const double> first(std::size_t n) const { return {h_first_.data() + n * dim_, dim_}; }
  std::span<const double> second(std::size_t n) const { return {h_second_.data() + n * dim_, dim_}; }

 private:
  template <class K, class H, class Observer>
  friend class CoupledRunner;

  std::size_t k_ = 0;
  std::size_t m_ = 0;
  std::size_t tau_ = 0;
  std::size_t dim_ = 0;
  std::size_t iterations_ = 0;
  std::uint64_t kernel_calls_ = 0;
  TrajectoryStatus status_ = TrajectoryStatus::met;
  std::vector<double> h_first_;
  std::vector<double> h_second_;
};

struct RunOptions {
  /// Hard cap on loop iterations before meeting; the run is then censored.
  std::size_t n_max = 1'000'000;
  /// Called after each iteration with the cost spent so far; returning false
  /// interrupts the run.
  std::function<bool(std::uint64_t)> on_iteration;
};

struct NoStateObserver {
  template <class State>
  void operator()(std::size_t, const State&, const State&) const {}
};

struct UnbiasedEstimate {
  Vector value;
  Vector mcmc_part;
  Vector bc_part;
  std::size_t tau = 0;
  std::uint64_t cost = 0;
  std::uint64_t replicate_id = 0;
  double wall_clock_seconds = 0.0;
};

/// T_m = 2(tau - 1) + max(1, m - tau + 1).
std::uint64_t cost(std::size_t tau, std::size_t m);

/// Time-averaged estimator over l = k..m, split into its ergodic-average and
/// bias-correction parts; `value == mcmc_part + bc_part`.
UnbiasedEstimate estimate(const CoupledTrajectory& traj);

/// H_{k:m} alone. Throws CensoredTrajectoryError unless the trajectory met.
Vector h_k_m(const CoupledTrajectory& traj);

struct Summary {
  std::size_t count = 0;
  Vector mean;
  Vector variance;
  Vector standard_error;
  Vector ci_lower;
  Vector ci_upper;
  double mean_cost = 0.0;
  /// mean_cost * variance, per component.
  Vector inefficiency;
};

/// Mean, sample variance, SE, normal 95% interval, mean cost, inefficiency.
Summary aggregate(std::span<const UnbiasedEstimate> estimates);

namespace detail {
template <class State, class H>
void append_h(std::vector<double>& out, const H& h, const State& z, std::size_t& dim) {
  const Vector value = h(z);
  if (dim == 0) dim = static_cast<std::size_t>(value.size());
  if (static_cast<std::size_t>(value.size()) != dim) {
    throw std::logic_error("test function changed dimension during a run");
  }
  out.insert(out.end(), value.data(), value.data() + value.size());
}
}  // namespace detail

template <class K, class H, class Observer>
class CoupledRunner {
 public:
  static CoupledTrajectory run(const K& kernel, const H& h, std::size_t k, std::size_t m, RngStream& s,
                               const RunOptions& opts, const Observer& observer) {
    if (k > m) throw std::invalid_argument("run_coupled: requires k <= m");
    using State = typename K::State;
    constexpr std::size_t kNotMet = std::numeric_limits<std::size_t>::max();

    CoupledTrajectory traj;
    traj.k_ = k;
    traj.m_ = m;

    State z0 = kernel.initial(s);
    State current_tilde = kernel.initial(s);  // Z~_{n-1}
    detail::append_h(traj.h_first_, h, z0, traj.dim_);
    State current = kernel.step(z0, s);  // Z_n
    std::uint64_t calls = 1;
    detail::append_h(traj.h_first_, h, current, traj.dim_);
    detail::append_h(traj.h_second_, h, current_tilde, traj.dim_);
    observer(1, current, current_tilde);

    std::size_t n = 1;
    std::size_t tau = (current == current_tilde) ? 1 : kNotMet;
    while (n < std::max(m, tau == kNotMet ? n + 1 : tau)) {
      if (tau == kNotMet && n >= opts.n_max) {
        traj.status_ = TrajectoryStatus::censored;
        break;
      }
      if (tau == kNotMet) {
        auto next = kernel.coupled_step(current, current_tilde, s);
        calls += 2;
        current = std::move(next.first);
        current_tilde = std::move(next.second);
        detail::append_h(traj.h_first_, h, current, traj.dim_);
        detail::append_h(traj.h_second_, h, current_tilde, traj.dim_);
        if (current == current_tilde) tau = n + 1;
      } else {
        // After meeting Z~_n = Z_{n+1}, so only one chain is advanced.
        current = kernel.step(current, s);
        calls += 1;
        current_tilde = current;
        detail::append_h(traj.h_first_, h, current, traj.dim_);
        const std::size_t row = traj.h_first_.size() - traj.dim_;
        traj.h_second_.insert(traj.h_second_.end(), traj.h_first_.begin() + static_cast<std::ptrdiff_t>(row),
                              traj.h_first_.end());
      }
      ++n;
      observer(n, current, current_tilde);
      if (opts.on_iteration && !opts.on_iteration(calls)) {
        if (n < std::max(m, tau)) {
          traj.status_ = TrajectoryStatus::interrupted;
          break;
        }
      }
    }
    traj.iterations_ = n;
    traj.kernel_calls_ = calls;
    traj.tau_ = (tau == kNotMet) ? 0 : tau;
    return traj;
  }
};

/// Simulate the lagged coupled pair until max(m, tau) and record
/// h along both chains. `h` maps a state to a Vector (vector-valued h is
/// handled component-wise).
template <CoupledChain K, class H, class Observer = NoStateObserver>
CoupledTrajectory run_coupled(const K& kernel, const H& h, std::size_t k, std::size_t m, RngStream& s,
                              const RunOptions& opts = {}, const Observer& observer = {}) {
  return CoupledRunner<K, H, Observer>::run(kernel, h, k, m, s, opts, observer);
}

/// Plain (serial) MCMC run: Z_0 ~ pi_0 followed by `iterations` draws from P.
/// Returns h(Z_1..Z_iterations) row-major.
template <CoupledChain K, class H>
std::vector<double> run_serial(const K& kernel, const H& h, std::size_t iterations, RngStream& s,
                               std::size_t* dim_out = nullptr) {
  std::vector<double> trace;
  std::size_t dim = 0;
  auto z = kernel.initial(s);
  for (std::size_t n = 0; n < iterations; ++n) {
    z = kernel.step(z, s);
    detail::append_h(trace, h, z, dim);
  }
  if (dim_out) *dim_out = dim;
  return trace;
}

}  // namespace umcmc
