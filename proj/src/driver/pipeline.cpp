#include "umcmc/driver/pipeline.hpp"

#include <algorithm>

#include "umcmc/driver/experiment.hpp"
#include "umcmc/driver/output.hpp"

namespace umcmc {

std::vector<std::size_t> survival_taus(const std::vector<TauRow>& rows) {
  std::size_t max_met = 0;
  for (const auto& r : rows) {
    if (!r.censored) max_met = std::max(max_met, r.tau);
  }
  std::vector<std::size_t> taus;
  taus.reserve(rows.size());
  for (const auto& r : rows) taus.push_back(r.censored ? std::max(max_met, r.tau) + 1 : r.tau);
  return taus;
}

TailFit survival_from_rows(const std::vector<TauRow>& rows, std::optional<std::size_t> n_min) {
  const auto taus = survival_taus(rows);
  if (taus.empty()) throw std::invalid_argument("no meeting times");
  return fit_meeting_times(taus, n_min);
}

nlohmann::json tail_fit_json(const TailFit& fit) {
  return {{"fit_C", fit.fit_C},
          {"fit_kappa", fit.fit_kappa},
          {"n_min", fit.n_min},
          {"n_end", fit.n_end},
          {"points", fit.points},
          {"kappa_first_half", fit.kappa_first_half},
          {"kappa_second_half", fit.kappa_second_half},
          {"super_polynomial", fit.super_polynomial}};
}

namespace {

std::vector<TauRow> rows_of(const std::vector<ReplicateRecord>& records) {
  std::vector<TauRow> rows;
  for (const auto& r : records) rows.push_back({r.replicate_id, r.tau, r.cost, r.wall_clock, r.censored});
  return rows;
}

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& cfg, const std::string& command, const ClockFactory& clocks) {
  if (command != "meetings" && command != "estimate") throw ConfigError("unknown pipeline command " + command);
  const bool estimating = command == "estimate";
  const Experiment experiment = make_experiment(cfg, estimating);
  const ReplicateFn& fn = estimating ? experiment.replicate : experiment.meeting;

  PipelineResult out;
  out.output_dir = cfg.get_string("experiment.output");
  const bool timing = cfg.get_bool("experiment.record_timing");
  const auto replicates = cfg.get_uint("experiment.replicates");
  const double budget = cfg.get_double("experiment.budget_seconds");
  const auto workers = cfg.get_uint("experiment.workers");
  std::optional<std::size_t> n_min;
  if (cfg.raw("experiment.nmin") != "auto") n_min = cfg.get_uint("experiment.nmin");

  PartialLog log(out.output_dir, cfg.hash(), command);
  const RecordSink sink = [&log](const ReplicateRecord& r) { log.append(r); };
  if (budget > 0.0) {
    // Budgeted runs interrupt in-flight work, so there is nothing to resume.
    out.run = run_budgeted(fn, budget, workers, clocks,
                           replicates > 0 ? std::optional<std::uint64_t>(replicates) : std::nullopt, sink);
  } else {
    out.run = run_replicates(fn, replicates, workers, sink, log.resumed());
  }
  const auto& records = out.run.records;

  nlohmann::json report;
  report["command"] = command;
  report["model"] = experiment.model;
  report["kernel"] = experiment.kernel;
  report["config_hash"] = cfg.hash();
  report["replicates"] = records.size();
  report["censored"] = out.run.censored;
  if (budget > 0.0) {
    report["budget_seconds"] = budget;
    report["discarded"] = out.run.discarded;
    if (timing) report["discarded_seconds"] = out.run.discarded_seconds;
  }
  double tau_sum = 0.0;
  std::size_t met = 0;
  for (const auto& r : records) {
    if (!r.censored) {
      tau_sum += static_cast<double>(r.tau);
      ++met;
    }
  }
  report["mean_tau"] = met ? tau_sum / static_cast<double>(met) : 0.0;

  if (estimating) {
    report["k"] = cfg.get_uint("experiment.k");
    report["m"] = cfg.get_uint("experiment.m");
    std::vector<UnbiasedEstimate> estimates;
    for (const auto& r : records) {
      if (r.censored) continue;
      UnbiasedEstimate e;
      e.value = Eigen::Map<const Vector>(r.h_values.data(), static_cast<Eigen::Index>(r.h_values.size()));
      e.tau = r.tau;
      e.cost = r.cost;
      e.replicate_id = r.replicate_id;
      estimates.push_back(std::move(e));
    }
    if (estimates.size() >= 2) {
      report["summary"] = summary_json(aggregate(estimates), experiment.h_names);
    } else {
      report["summary"] = nullptr;
    }
    atomic_write(out.output_dir / "estimates.csv", estimates_csv(records, experiment.h_names));
  }

  const auto rows = rows_of(records);
  std::string survival = "n,p,fit\n";
  try {
    const TailFit fit = survival_from_rows(rows, n_min);
    report["tail_fit"] = tail_fit_json(fit);
    for (std::size_t n = 0; n < fit.survival.size(); ++n) {
      survival += std::to_string(n) + ',' + format_double(fit.survival[n]) + ',' +
                  (n >= fit.n_min ? format_double(fit.bound(n)) : std::string()) + '\n';
    }
  } catch (const std::invalid_argument& e) {
    report["tail_fit"] = nullptr;
    report["tail_fit_error"] = e.what();
    if (met > 0) {
      const auto taus = survival_taus(rows);
      const auto p = empirical_survival(taus, *std::max_element(taus.begin(), taus.end()));
      for (std::size_t n = 0; n < p.size(); ++n) survival += std::to_string(n) + ',' + format_double(p[n]) + ",\n";
    }
  }
  atomic_write(out.output_dir / "survival.csv", survival);
  atomic_write(out.output_dir / "taus.csv", taus_csv(records, timing));
  atomic_write(out.output_dir / "report.json", report.dump(2) + '\n');
  atomic_write(out.output_dir / "manifest.json", manifest_json(cfg, command).dump(2) + '\n');
  log.finish();

  out.report = std::move(report);
  if (out.run.censored > cfg.get_uint("experiment.max_censored")) out.exit_code = kExitCensored;
  return out;
}

}  // namespace umcmc
