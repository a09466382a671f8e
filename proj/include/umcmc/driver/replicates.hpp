#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "umcmc/driver/experiment.hpp"

namespace umcmc {

struct ReplicateRecord {
  std::uint64_t replicate_id = 0;
  std::size_t tau = 0;
  std::uint64_t cost = 0;
  /// Empty for censored records.
  std::vector<double> h_values;
  double wall_clock = 0.0;
  bool censored = false;
  std::size_t worker_id = 0;
};

/// Receives each record as soon as it completes (serialized by the caller).
using RecordSink = std::function<void(const ReplicateRecord&)>;

struct RunResult {
  /// Sorted by replicate_id.
  std::vector<ReplicateRecord> records;
  std::size_t censored = 0;
  std::size_t discarded = 0;
  double discarded_seconds = 0.0;
};

/// Runs replicates 0..count-1 over a thread pool. Ids present in `done` are
/// taken as already computed (resume) and not rerun. Output is independent
/// of the worker count.
RunResult run_replicates(const ReplicateFn& fn, std::uint64_t count, std::size_t workers,
                         const RecordSink& sink = {}, std::vector<ReplicateRecord> done = {});

/// Time source of one processor. `on_work` is told about kernel calls so a
/// fake clock can advance with work.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() = 0;
  virtual void on_work(std::uint64_t /*kernel_calls*/) {}
};

class SteadyClock final : public Clock {
 public:
  SteadyClock();
  double now() override;

 private:
  double origin_;
};

/// Fake time: each kernel call costs `seconds_per_call`.
class StepClock final : public Clock {
 public:
  explicit StepClock(double seconds_per_call = 1.0) : step_(seconds_per_call) {}
  double now() override { return static_cast<double>(calls_) * step_; }
  void on_work(std::uint64_t calls) override { calls_ += calls; }

 private:
  double step_;
  std::uint64_t calls_ = 0;
};

using ClockFactory = std::function<std::unique_ptr<Clock>(std::size_t worker)>;

/// Budgeted production over `processors` logical processors. Processor p
/// runs replicate ids p, p + P, p + 2P, ... until its clock passes `budget`.
/// A replicate in flight at expiry is interrupted and discarded unless the
/// processor has no completed replicate yet, in which case it runs to
/// completion. `max_replicates` caps the total id range.
RunResult run_budgeted(const ReplicateFn& fn, double budget, std::size_t processors, const ClockFactory& clocks,
                       std::optional<std::uint64_t> max_replicates = std::nullopt, const RecordSink& sink = {});

ClockFactory steady_clocks();
ClockFactory step_clocks(double seconds_per_call = 1.0);

}  // namespace umcmc
