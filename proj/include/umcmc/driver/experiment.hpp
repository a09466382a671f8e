#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "umcmc/driver/config.hpp"
#include "umcmc/unbiased.hpp"

namespace umcmc {

/// Result of one coupled run. `value` is H_{k:m} when the run met.
struct ReplicateOutcome {
  TrajectoryStatus status = TrajectoryStatus::met;
  std::size_t tau = 0;
  std::uint64_t cost = 0;
  std::size_t iterations = 0;
  std::vector<double> value;
};

/// Called with the kernel calls spent so far; returning false interrupts.
using InterruptHook = std::function<bool(std::uint64_t)>;

/// One replicate as a pure function of its id (the stream is derived from
/// the id inside).
using ReplicateFn = std::function<ReplicateOutcome(std::uint64_t replicate_id, const InterruptHook& hook)>;

/// Replicate r runs on RngStream(seed, r).
template <CoupledChain K, class H>
ReplicateFn make_replicate_fn(std::shared_ptr<const K> kernel, H h, std::size_t k, std::size_t m,
                              std::uint64_t seed, std::size_t n_max) {
  return [kernel = std::move(kernel), h = std::move(h), k, m, seed, n_max](std::uint64_t id,
                                                                           const InterruptHook& hook) {
    RngStream s(seed, id);
    RunOptions opts;
    opts.n_max = n_max;
    opts.on_iteration = hook;
    const CoupledTrajectory traj = run_coupled(*kernel, h, k, m, s, opts);
    ReplicateOutcome out;
    out.status = traj.status();
    out.cost = traj.kernel_calls();
    out.iterations = traj.iterations();
    if (traj.met()) {
      out.tau = traj.tau();
      const Vector value = h_k_m(traj);
      out.value.assign(value.data(), value.data() + value.size());
    }
    return out;
  };
}

/// Serial chain trace: `iterations` rows of h, row-major.
using SerialFn = std::function<std::vector<double>(std::size_t iterations, RngStream& s)>;

template <CoupledChain K, class H>
SerialFn make_serial_fn(std::shared_ptr<const K> kernel, H h) {
  return [kernel = std::move(kernel), h = std::move(h)](std::size_t iterations, RngStream& s) {
    return run_serial(*kernel, h, iterations, s);
  };
}

struct Experiment {
  std::string model;
  std::string kernel;
  /// Names of the h components (the parameter coordinates).
  std::vector<std::string> h_names;
  /// Full estimator run with the configured (k, m).
  ReplicateFn replicate;
  /// Runs only until the chains meet.
  ReplicateFn meeting;
  SerialFn serial;
};

/// Build the model, kernel, proposal and initial law described by `cfg`.
/// Throws ConfigError on any misconfiguration before work begins.
Experiment make_experiment(const ExperimentConfig& cfg, bool need_estimator_window);

/// Dataset for the configured model: from its data file when given,
/// otherwise simulated from the generative process with the model's
/// data_seed. Written to `path` in the model's text format.
void write_model_dataset(const ExperimentConfig& cfg, const std::string& path);

}  // namespace umcmc
