#include "umcmc/driver/output.hpp"

#include <boost/version.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>

#include "umcmc/models/data_io.hpp"

namespace umcmc {

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw DataFormatError("bad " + what + ": " + text);
  return value;
}

std::string record_line(const ReplicateRecord& r) {
  std::string line = std::to_string(r.replicate_id) + ',' + std::to_string(r.tau) + ',' + std::to_string(r.cost) +
                     ',' + (r.censored ? "1" : "0") + ',' + std::to_string(r.worker_id) + ',' +
                     format_double(r.wall_clock);
  for (double v : r.h_values) line += ',' + format_double(v);
  return line + '\n';
}

ReplicateRecord parse_record_line(const std::string& line) {
  const auto f = split(line);
  if (f.size() < 6) throw DataFormatError("truncated record line");
  ReplicateRecord r;
  r.replicate_id = parse_number<std::uint64_t>(f[0], "replicate id");
  r.tau = parse_number<std::size_t>(f[1], "tau");
  r.cost = parse_number<std::uint64_t>(f[2], "cost");
  r.censored = f[3] == "1";
  r.worker_id = parse_number<std::size_t>(f[4], "worker");
  r.wall_clock = parse_number<double>(f[5], "seconds");
  for (std::size_t i = 6; i < f.size(); ++i) r.h_values.push_back(parse_number<double>(f[i], "h value"));
  return r;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return {buf, ptr};
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string taus_csv(const std::vector<ReplicateRecord>& records, bool timing) {
  std::string out = "replicate_id,tau,cost,seconds,censored\n";
  for (const auto& r : records) {
    out += std::to_string(r.replicate_id) + ',' + std::to_string(r.tau) + ',' + std::to_string(r.cost) + ',' +
           (timing ? format_double(r.wall_clock) : std::string("0")) + ',' + (r.censored ? "1" : "0") + '\n';
  }
  return out;
}

std::string estimates_csv(const std::vector<ReplicateRecord>& records, const std::vector<std::string>& h_names) {
  std::string out = "replicate_id";
  for (const auto& name : h_names) out += ',' + name;
  out += ",tau,cost\n";
  for (const auto& r : records) {
    if (r.censored) continue;
    out += std::to_string(r.replicate_id);
    for (double v : r.h_values) out += ',' + format_double(v);
    out += ',' + std::to_string(r.tau) + ',' + std::to_string(r.cost) + '\n';
  }
  return out;
}

std::vector<TauRow> read_taus_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataFormatError(path.string() + ": empty file");
  const auto header = split(line);
  int col_id = -1, col_tau = -1, col_cost = -1, col_sec = -1, col_cens = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& h = header[i];
    const int c = static_cast<int>(i);
    if (h == "replicate_id") col_id = c;
    if (h == "tau") col_tau = c;
    if (h == "cost") col_cost = c;
    if (h == "seconds") col_sec = c;
    if (h == "censored") col_cens = c;
  }
  if (col_tau < 0) throw DataFormatError(path.string() + ": no tau column");
  std::vector<TauRow> rows;
  std::uint64_t auto_id = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) throw DataFormatError(path.string() + ": ragged row");
    TauRow row;
    row.replicate_id = col_id >= 0 ? parse_number<std::uint64_t>(f[col_id], "replicate id") : auto_id;
    ++auto_id;
    row.tau = parse_number<std::size_t>(f[col_tau], "tau");
    if (col_cost >= 0) row.cost = parse_number<std::uint64_t>(f[col_cost], "cost");
    if (col_sec >= 0) row.seconds = parse_number<double>(f[col_sec], "seconds");
    if (col_cens >= 0) row.censored = f[col_cens] == "1";
    rows.push_back(row);
  }
  return rows;
}

EstimateTable read_estimates_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataFormatError(path.string() + ": empty file");
  const auto header = split(line);
  if (header.size() < 4 || header.front() != "replicate_id" || header[header.size() - 2] != "tau" ||
      header.back() != "cost") {
    throw DataFormatError(path.string() + ": not an estimates table");
  }
  EstimateTable table;
  table.h_names.assign(header.begin() + 1, header.end() - 2);
  const auto dim = static_cast<Eigen::Index>(table.h_names.size());
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) throw DataFormatError(path.string() + ": ragged row");
    UnbiasedEstimate e;
    e.replicate_id = parse_number<std::uint64_t>(f[0], "replicate id");
    e.value.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) e.value[i] = parse_number<double>(f[static_cast<std::size_t>(i) + 1], "h value");
    e.tau = parse_number<std::size_t>(f[f.size() - 2], "tau");
    e.cost = parse_number<std::uint64_t>(f.back(), "cost");
    table.estimates.push_back(std::move(e));
  }
  return table;
}

PartialLog::PartialLog(const std::filesystem::path& dir, const std::string& config_hash, const std::string& command)
    : log_path_(dir / "records.partial"), guard_path_(dir / "records.partial.guard") {
  std::filesystem::create_directories(dir);
  const std::string guard = command + ' ' + config_hash;
  bool resume = false;
  if (std::filesystem::exists(guard_path_) && std::filesystem::exists(log_path_)) {
    std::ifstream g(guard_path_);
    std::string existing;
    std::getline(g, existing);
    resume = existing == guard;
  }
  if (resume) {
    std::ifstream in(log_path_);
    std::string line;
    std::string valid;
    while (std::getline(in, line)) {
      // A crash can leave a final partial line without its newline.
      if (in.eof()) break;
      try {
        resumed_.push_back(parse_record_line(line));
        valid += line + '\n';
      } catch (const DataFormatError&) {
        break;
      }
    }
    atomic_write(log_path_, valid);
  } else {
    atomic_write(log_path_, "");
    atomic_write(guard_path_, guard + '\n');
  }
  file_ = std::fopen(log_path_.c_str(), "a");
  if (!file_) throw std::runtime_error("cannot open " + log_path_.string());
}

PartialLog::~PartialLog() {
  if (file_) std::fclose(file_);
}

void PartialLog::append(const ReplicateRecord& record) {
  const std::string line = record_line(record);
  std::fwrite(line.data(), 1, line.size(), file_);
  std::fflush(file_);
}

void PartialLog::finish() {
  if (file_) std::fclose(file_);
  file_ = nullptr;
  std::filesystem::remove(log_path_);
  std::filesystem::remove(guard_path_);
}

std::string compiler_version() {
#if defined(__clang__)
  return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  return "gcc " + std::to_string(__GNUC__) + "." + std::to_string(__GNUC_MINOR__) + "." +
         std::to_string(__GNUC_PATCHLEVEL__);
#else
  return "unknown";
#endif
}

nlohmann::json manifest_json(const ExperimentConfig& cfg, const std::string& command) {
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [key, value] : cfg.values()) {
    if (key == "experiment.workers" || key == "experiment.output") continue;
    config[key] = value;
  }
  return {
      {"command", command},
      {"config_hash", cfg.hash()},
      {"seed", cfg.raw("experiment.seed")},
      {"config", config},
      {"schemas",
       {{"taus.csv", kTausSchemaVersion},
        {"estimates.csv", kEstimatesSchemaVersion},
        {"survival.csv", kSurvivalSchemaVersion},
        {"report.json", kReportSchemaVersion}}},
      {"versions",
       {{"umcmc", "0.1.0"},
        {"compiler", compiler_version()},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                      std::to_string(BOOST_VERSION % 100)},
        {"rng", "philox4x64-10"}}},
  };
}

nlohmann::json summary_json(const Summary& s, const std::vector<std::string>& h_names) {
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {
      {"count", s.count},
      {"h_names", h_names},
      {"mean", vec(s.mean)},
      {"variance", vec(s.variance)},
      {"standard_error", vec(s.standard_error)},
      {"ci95_lower", vec(s.ci_lower)},
      {"ci95_upper", vec(s.ci_upper)},
      {"mean_cost", s.mean_cost},
      {"inefficiency", vec(s.inefficiency)},
  };
}

}  // namespace umcmc
