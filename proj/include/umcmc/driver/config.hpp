#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace umcmc {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Sectioned key = value configuration with a fixed schema. Every key has a
/// registered default (possibly empty, meaning "unset"); unknown keys are
/// rejected on parse and on override.
class ExperimentConfig {
 public:
  ExperimentConfig();

  static ExperimentConfig parse(std::istream& in, const std::string& origin = "<config>");
  static ExperimentConfig parse_string(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// `key` is "section.name".
  void set(const std::string& key, const std::string& value);
  /// "section.name=value".
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const;
  const std::string& raw(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  std::optional<double> maybe_double(const std::string& key) const;
  std::optional<std::uint64_t> maybe_uint(const std::string& key) const;

  /// Sorted key=value lines over every schema key, excluding keys that do not
  /// affect results (worker count, output location).
  std::string canonical_text() const;
  /// FNV-1a 64 of canonical_text(), as 16 hex digits.
  std::string hash() const;

  /// Cross-field checks: model/kernel combination, parameter domains, k <= m.
  void validate(bool need_estimator_window) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  static const std::map<std::string, std::string>& schema();

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace umcmc
