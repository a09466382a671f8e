#include "umcmc/driver/replicates.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace umcmc {

namespace {

double steady_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

ReplicateRecord to_record(std::uint64_t id, const ReplicateOutcome& outcome, double seconds, std::size_t worker) {
  ReplicateRecord rec;
  rec.replicate_id = id;
  rec.cost = outcome.cost;
  rec.wall_clock = seconds;
  rec.worker_id = worker;
  if (outcome.status == TrajectoryStatus::censored) {
    rec.censored = true;
    rec.tau = outcome.iterations;
  } else {
    rec.tau = outcome.tau;
    rec.h_values = outcome.value;
  }
  return rec;
}

void sort_records(std::vector<ReplicateRecord>& records) {
  std::sort(records.begin(), records.end(),
            [](const ReplicateRecord& a, const ReplicateRecord& b) { return a.replicate_id < b.replicate_id; });
}

/// Runs `body(worker)` on `workers` threads and rethrows the first failure.
template <class Body>
void parallel(std::size_t workers, Body body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto guarded = [&](std::size_t w) {
    try {
      body(w);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (workers <= 1) {
    guarded(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(guarded, w);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

RunResult run_replicates(const ReplicateFn& fn, std::uint64_t count, std::size_t workers, const RecordSink& sink,
                         std::vector<ReplicateRecord> done) {
  std::set<std::uint64_t> skip;
  for (const auto& rec : done) skip.insert(rec.replicate_id);
  std::vector<std::uint64_t> todo;
  for (std::uint64_t id = 0; id < count; ++id) {
    if (!skip.contains(id)) todo.push_back(id);
  }

  RunResult result;
  result.records = std::move(done);
  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  parallel(std::max<std::size_t>(workers, 1), [&](std::size_t worker) {
    while (!stop) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) break;
      try {
        const double start = steady_seconds();
        const ReplicateOutcome outcome = fn(todo[i], {});
        ReplicateRecord rec = to_record(todo[i], outcome, steady_seconds() - start, worker);
        std::lock_guard lock(mutex);
        if (sink) sink(rec);
        result.records.push_back(std::move(rec));
      } catch (...) {
        stop = true;
        throw;
      }
    }
  });
  sort_records(result.records);
  for (const auto& rec : result.records) result.censored += rec.censored ? 1 : 0;
  return result;
}

SteadyClock::SteadyClock() : origin_(steady_seconds()) {}
double SteadyClock::now() { return steady_seconds() - origin_; }

ClockFactory steady_clocks() {
  return [](std::size_t) { return std::make_unique<SteadyClock>(); };
}

ClockFactory step_clocks(double seconds_per_call) {
  return [seconds_per_call](std::size_t) { return std::make_unique<StepClock>(seconds_per_call); };
}

RunResult run_budgeted(const ReplicateFn& fn, double budget, std::size_t processors, const ClockFactory& clocks,
                       std::optional<std::uint64_t> max_replicates, const RecordSink& sink) {
  if (!(budget > 0.0)) throw std::invalid_argument("run_budgeted: budget must be > 0");
  processors = std::max<std::size_t>(processors, 1);
  RunResult result;
  std::mutex mutex;

  parallel(processors, [&](std::size_t p) {
    std::unique_ptr<Clock> clock = clocks(p);
    std::size_t completed = 0;
    for (std::uint64_t id = p;; id += processors) {
      if (max_replicates && id >= *max_replicates) break;
      if (clock->now() >= budget && completed > 0) break;
      const double start = clock->now();
      std::uint64_t reported = 0;
      const InterruptHook hook = [&](std::uint64_t calls) {
        clock->on_work(calls - reported);
        reported = calls;
        return !(completed > 0 && clock->now() >= budget);
      };
      const ReplicateOutcome outcome = fn(id, hook);
      if (outcome.cost > reported) clock->on_work(outcome.cost - reported);
      const double elapsed = clock->now() - start;
      std::lock_guard lock(mutex);
      if (outcome.status == TrajectoryStatus::interrupted) {
        ++result.discarded;
        result.discarded_seconds += elapsed;
        break;
      }
      ReplicateRecord rec = to_record(id, outcome, elapsed, p);
      if (sink) sink(rec);
      result.records.push_back(std::move(rec));
      ++completed;
    }
  });
  sort_records(result.records);
  for (const auto& rec : result.records) result.censored += rec.censored ? 1 : 0;
  return result;
}

}  // namespace umcmc
