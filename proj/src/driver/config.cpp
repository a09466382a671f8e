#include "umcmc/driver/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace umcmc {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::set<std::string> kModels{"toy", "beta_bernoulli", "lgssm", "binomial_ssm", "ising"};
const std::set<std::string> kKernels{"mh", "pm", "block_pm", "exchange"};

}  // namespace

const std::map<std::string, std::string>& ExperimentConfig::schema() {
  static const std::map<std::string, std::string> keys{
      {"experiment.model", ""},
      {"experiment.kernel", ""},
      {"experiment.k", ""},
      {"experiment.m", ""},
      {"experiment.replicates", "0"},
      {"experiment.budget_seconds", "0"},
      {"experiment.seed", "1"},
      {"experiment.workers", "1"},
      {"experiment.output", "results"},
      {"experiment.n_max", "1000000"},
      {"experiment.max_censored", "0"},
      {"experiment.record_timing", "true"},
      {"experiment.nmin", "auto"},
      {"experiment.n_mcmc", "0"},
      {"experiment.n_burnin", "0"},
      {"experiment.component", "0"},
      {"proposal.sd", ""},
      {"init.kind", "default"},
      {"init.lower", ""},
      {"init.upper", ""},
      {"init.mean", ""},
      {"init.sd", ""},
      {"toy.mean", "1,2"},
      {"toy.sigma", "0"},
      {"beta_bernoulli.alpha", "1"},
      {"beta_bernoulli.eps", "0"},
      {"beta_bernoulli.particles", "10"},
      {"beta_bernoulli.beta_lo", "0.1"},
      {"beta_bernoulli.beta_hi", "10"},
      {"beta_bernoulli.data", ""},
      {"beta_bernoulli.T", "100"},
      {"beta_bernoulli.beta_true", "2"},
      {"beta_bernoulli.data_seed", "1"},
      {"lgssm.particles", "100"},
      {"lgssm.data", ""},
      {"lgssm.T", "100"},
      {"lgssm.a_true", "0.5"},
      {"lgssm.sigma_true", "1"},
      {"lgssm.data_seed", "1"},
      {"binomial_ssm.particles", "128"},
      {"binomial_ssm.trials", "50"},
      {"binomial_ssm.data", ""},
      {"binomial_ssm.T", "3000"},
      {"binomial_ssm.a_true", "0.99"},
      {"binomial_ssm.sigma2_true", "0.11"},
      {"binomial_ssm.data_seed", "1"},
      {"ising.side", "4"},
      {"ising.beta_max", "0.44068679350977151"},
      {"ising.data", ""},
      {"ising.beta_true", "0.3"},
      {"ising.data_seed", "1"},
  };
  return keys;
}

ExperimentConfig::ExperimentConfig() : values_(schema()) {}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& origin) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string section;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      const auto& known = schema();
      const auto it = known.lower_bound(section + ".");
      if (it == known.end() || !it->first.starts_with(section + "."))
        throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of any section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key " + key);
    try {
      cfg.set(key, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (!schema().contains(key)) throw ConfigError("unknown key " + key);
  values_[key] = value;
}

void ExperimentConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must be section.key=value: " + assignment);
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

bool ExperimentConfig::has(const std::string& key) const { return !raw(key).empty(); }

const std::string& ExperimentConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key " + key);
  return it->second;
}

std::string ExperimentConfig::get_string(const std::string& key) const {
  const std::string& v = raw(key);
  if (v.empty()) throw ConfigError("missing required key " + key);
  return v;
}

double ExperimentConfig::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": not a finite number: " + v);
  }
  return out;
}

std::uint64_t ExperimentConfig::get_uint(const std::string& key) const {
  const std::string v = get_string(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError(key + ": not a non-negative integer: " + v);
  return out;
}

bool ExperimentConfig::get_bool(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": not a boolean: " + v);
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& key) const {
  const std::string v = get_string(key);
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() || !std::isfinite(x)) {
      throw ConfigError(key + ": not a list of finite numbers: " + v);
    }
    out.push_back(x);
  }
  return out;
}

std::optional<double> ExperimentConfig::maybe_double(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_double(key);
}

std::optional<std::uint64_t> ExperimentConfig::maybe_uint(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_uint(key);
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) {
    if (key == "experiment.workers" || key == "experiment.output") continue;
    out << key << '=' << value << '\n';
  }
  return out.str();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical_text()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

void ExperimentConfig::validate(bool need_estimator_window) const {
  const std::string model = get_string("experiment.model");
  const std::string kernel = get_string("experiment.kernel");
  if (!kModels.contains(model)) throw ConfigError("experiment.model: unknown model " + model);
  if (!kKernels.contains(kernel)) throw ConfigError("experiment.kernel: unknown kernel " + kernel);

  const bool ok = (model == "toy" && (kernel == "mh" || kernel == "pm")) ||
                  (model == "beta_bernoulli" && (kernel == "mh" || kernel == "pm" || kernel == "block_pm")) ||
                  (model == "lgssm" && (kernel == "mh" || kernel == "pm")) ||
                  (model == "binomial_ssm" && kernel == "pm") || (model == "ising" && kernel == "exchange");
  if (!ok) throw ConfigError("kernel " + kernel + " is not available for model " + model);

  if (need_estimator_window) {
    const auto k = get_uint("experiment.k");
    const auto m = get_uint("experiment.m");
    if (k > m) throw ConfigError("experiment.k must not exceed experiment.m");
  }
  const auto replicates = get_uint("experiment.replicates");
  const double budget = get_double("experiment.budget_seconds");
  if (budget < 0.0) throw ConfigError("experiment.budget_seconds must be >= 0");
  if (replicates < 1 && !(budget > 0.0)) {
    throw ConfigError("set experiment.replicates >= 1 or experiment.budget_seconds > 0");
  }
  if (get_uint("experiment.workers") < 1) throw ConfigError("experiment.workers must be >= 1");
  if (get_uint("experiment.n_max") < 1) throw ConfigError("experiment.n_max must be >= 1");
  get_bool("experiment.record_timing");
  if (raw("experiment.nmin") != "auto") get_uint("experiment.nmin");

  for (double sd : get_doubles("proposal.sd")) {
    if (!(sd > 0.0)) throw ConfigError("proposal.sd entries must be > 0");
  }
  const std::string init = get_string("init.kind");
  if (init == "uniform") {
    const auto lo = get_doubles("init.lower");
    const auto hi = get_doubles("init.upper");
    if (lo.size() != hi.size()) throw ConfigError("init.lower and init.upper differ in length");
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (!(lo[i] < hi[i])) throw ConfigError("init.lower must be below init.upper");
    }
  } else if (init == "normal") {
    const auto mean = get_doubles("init.mean");
    const auto sd = get_doubles("init.sd");
    if (mean.size() != sd.size()) throw ConfigError("init.mean and init.sd differ in length");
    for (double v : sd) {
      if (!(v > 0.0)) throw ConfigError("init.sd entries must be > 0");
    }
  } else if (init != "default") {
    throw ConfigError("init.kind must be default, uniform or normal");
  }

  if (model == "toy") {
    if (get_double("toy.sigma") < 0.0) throw ConfigError("toy.sigma must be >= 0");
    get_doubles("toy.mean");
  } else if (model == "beta_bernoulli") {
    if (!(get_double("beta_bernoulli.alpha") > 0.0)) throw ConfigError("beta_bernoulli.alpha must be > 0");
    if (get_double("beta_bernoulli.eps") < 0.0) throw ConfigError("beta_bernoulli.eps must be >= 0");
    if (get_uint("beta_bernoulli.particles") < 1) throw ConfigError("beta_bernoulli.particles must be >= 1");
    const double lo = get_double("beta_bernoulli.beta_lo");
    const double hi = get_double("beta_bernoulli.beta_hi");
    if (!(0.0 < lo && lo < hi)) throw ConfigError("beta_bernoulli prior bounds must satisfy 0 < lo < hi");
    if (!has("beta_bernoulli.data") && !(get_double("beta_bernoulli.beta_true") > 0.0)) {
      throw ConfigError("beta_bernoulli.beta_true must be > 0");
    }
  } else if (model == "lgssm") {
    if (get_uint("lgssm.particles") < 2) throw ConfigError("lgssm.particles must be >= 2");
    if (!has("lgssm.data") && !(get_double("lgssm.sigma_true") > 0.0)) {
      throw ConfigError("lgssm.sigma_true must be > 0");
    }
  } else if (model == "binomial_ssm") {
    if (get_uint("binomial_ssm.particles") < 2) throw ConfigError("binomial_ssm.particles must be >= 2");
    if (get_uint("binomial_ssm.trials") < 1) throw ConfigError("binomial_ssm.trials must be >= 1");
    if (!has("binomial_ssm.data") && !(get_double("binomial_ssm.sigma2_true") > 0.0)) {
      throw ConfigError("binomial_ssm.sigma2_true must be > 0");
    }
  } else if (model == "ising") {
    const auto side = get_uint("ising.side");
    if (side < 2 || side > 64) throw ConfigError("ising.side must lie in [2, 64]");
    if (!(get_double("ising.beta_max") > 0.0)) throw ConfigError("ising.beta_max must be > 0");
    if (get_double("ising.beta_true") < 0.0) throw ConfigError("ising.beta_true must be >= 0");
  }
}

}  // namespace umcmc
