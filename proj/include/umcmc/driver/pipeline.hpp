#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "umcmc/diagnostics.hpp"
#include "umcmc/driver/config.hpp"
#include "umcmc/driver/output.hpp"
#include "umcmc/driver/replicates.hpp"

namespace umcmc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitCensored = 3;

struct PipelineResult {
  int exit_code = kExitOk;
  RunResult run;
  nlohmann::json report;
  std::filesystem::path output_dir;
};

/// `command` is "meetings" (run each replicate until the chains meet) or
/// "estimate" (full H_{k:m}). Writes taus.csv, survival.csv, report.json,
/// manifest.json and, for "estimate", estimates.csv into experiment.output.
/// Resumes from a partial log left by an interrupted run of the same config.
/// Throws ConfigError before any work on misconfiguration.
PipelineResult run_pipeline(const ExperimentConfig& cfg, const std::string& command,
                            const ClockFactory& clocks = steady_clocks());

/// Meeting times for survival analysis. Censored rows are treated as
/// exceeding every uncensored value.
std::vector<std::size_t> survival_taus(const std::vector<TauRow>& rows);

nlohmann::json tail_fit_json(const TailFit& fit);

/// Survival table plus fitted bound; `n_min` empty means the default window.
TailFit survival_from_rows(const std::vector<TauRow>& rows, std::optional<std::size_t> n_min);

}  // namespace umcmc
