#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "umcmc/driver/config.hpp"
#include "umcmc/driver/replicates.hpp"
#include "umcmc/unbiased.hpp"

namespace umcmc {

inline constexpr int kTausSchemaVersion = 1;
inline constexpr int kEstimatesSchemaVersion = 1;
inline constexpr int kSurvivalSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

/// Shortest text that round-trips the double.
std::string format_double(double value);

/// Write `content` to a temporary sibling and rename it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Columns replicate_id, tau, cost, seconds, censored. With `timing` off the
/// seconds column is written as 0 so files depend on (config, seed) only.
std::string taus_csv(const std::vector<ReplicateRecord>& records, bool timing);

/// Columns replicate_id, one per h component, tau, cost. Censored records are
/// omitted since they carry no estimate.
std::string estimates_csv(const std::vector<ReplicateRecord>& records, const std::vector<std::string>& h_names);

struct TauRow {
  std::uint64_t replicate_id = 0;
  std::size_t tau = 0;
  std::uint64_t cost = 0;
  double seconds = 0.0;
  bool censored = false;
};
std::vector<TauRow> read_taus_csv(const std::filesystem::path& path);

struct EstimateTable {
  std::vector<std::string> h_names;
  std::vector<UnbiasedEstimate> estimates;
};
EstimateTable read_estimates_csv(const std::filesystem::path& path);

/// Append-only per-record log inside an output directory, guarded by the
/// config hash. Opening with a matching hash resumes the logged records;
/// any other hash discards them.
class PartialLog {
 public:
  PartialLog(const std::filesystem::path& dir, const std::string& config_hash, const std::string& command);
  ~PartialLog();
  PartialLog(const PartialLog&) = delete;
  PartialLog& operator=(const PartialLog&) = delete;

  const std::vector<ReplicateRecord>& resumed() const { return resumed_; }
  void append(const ReplicateRecord& record);
  /// Remove the log after final outputs are in place.
  void finish();

 private:
  std::filesystem::path log_path_;
  std::filesystem::path guard_path_;
  std::vector<ReplicateRecord> resumed_;
  std::FILE* file_ = nullptr;
};

/// Config hash, seed, schema and library versions, and the effective config.
nlohmann::json manifest_json(const ExperimentConfig& cfg, const std::string& command);

nlohmann::json summary_json(const Summary& summary, const std::vector<std::string>& h_names);

std::string compiler_version();

}  // namespace umcmc
