#include <CLI11.hpp>
#include <json.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "umcmc/diagnostics.hpp"
#include "umcmc/driver/config.hpp"
#include "umcmc/driver/experiment.hpp"
#include "umcmc/driver/output.hpp"
#include "umcmc/driver/pipeline.hpp"
#include "umcmc/models/data_io.hpp"
#include "umcmc/models/ising.hpp"

using namespace umcmc;

namespace {

struct Overrides {
  std::string config;
  std::optional<double> sigma;
  std::optional<std::uint64_t> k, m, particles, replicates, workers, seed;
  std::optional<double> budget;
  std::optional<std::string> nmin, output;
  std::vector<std::string> sets;
};

void add_config_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Experiment config file")->required();
  cmd->add_option("--sigma", o.sigma, "Toy log-noise sd (toy.sigma)");
  cmd->add_option("--k", o.k, "Estimator start k");
  cmd->add_option("--m", o.m, "Estimator end m");
  cmd->add_option("--particles", o.particles, "Particle / importance sample count of the model");
  cmd->add_option("--replicates", o.replicates, "Number of replicates R");
  cmd->add_option("--budget", o.budget, "Wall-clock budget per processor in seconds");
  cmd->add_option("--workers", o.workers, "Worker threads");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--nmin", o.nmin, "Tail-fit window start, or auto");
  cmd->add_option("--output", o.output, "Output directory");
  cmd->add_option("--set", o.sets, "Override section.key=value (repeatable)");
}

ExperimentConfig build_config(const Overrides& o) {
  ExperimentConfig cfg = ExperimentConfig::load(o.config);
  auto set_num = [&cfg](const std::string& key, const auto& value) {
    if (value) cfg.set(key, format_double(static_cast<double>(*value)));
  };
  auto set_uint = [&cfg](const std::string& key, const auto& value) {
    if (value) cfg.set(key, std::to_string(*value));
  };
  set_num("toy.sigma", o.sigma);
  set_uint("experiment.k", o.k);
  set_uint("experiment.m", o.m);
  set_uint("experiment.replicates", o.replicates);
  set_num("experiment.budget_seconds", o.budget);
  set_uint("experiment.workers", o.workers);
  set_uint("experiment.seed", o.seed);
  if (o.nmin) cfg.set("experiment.nmin", *o.nmin);
  if (o.output) cfg.set("experiment.output", *o.output);
  if (o.particles) {
    const std::string model = cfg.get_string("experiment.model");
    if (model == "toy" || model == "ising") throw ConfigError("--particles does not apply to model " + model);
    cfg.set(model + ".particles", std::to_string(*o.particles));
  }
  for (const auto& s : o.sets) cfg.apply_override(s);
  return cfg;
}

int run_pipeline_command(const Overrides& o, const std::string& command) {
  const ExperimentConfig cfg = build_config(o);
  const PipelineResult result = run_pipeline(cfg, command);
  std::cout << result.report.dump(2) << '\n';
  if (result.exit_code == kExitCensored) {
    std::cerr << "error: " << result.run.censored << " censored replicates exceed experiment.max_censored\n";
  }
  return result.exit_code;
}

int simulate_data(const Overrides& o, const std::string& path) {
  const ExperimentConfig cfg = build_config(o);
  write_model_dataset(cfg, path);
  std::cout << path << '\n';
  return kExitOk;
}

int survival(const std::string& input, const std::string& nmin, const std::string& output) {
  std::optional<std::size_t> n_min;
  if (nmin != "auto") n_min = static_cast<std::size_t>(std::stoull(nmin));
  const TailFit fit = survival_from_rows(read_taus_csv(input), n_min);
  write_survival_csv(output, fit);
  std::cout << tail_fit_json(fit).dump(2) << '\n';
  return kExitOk;
}

int inefficiency(const Overrides& o, const std::string& estimates_path, const std::string& unit_name) {
  const ExperimentConfig cfg = build_config(o);
  if (unit_name != "kernel_calls" && unit_name != "seconds") throw ConfigError("--unit must be kernel_calls or seconds");
  const CostUnit unit = unit_name == "seconds" ? CostUnit::seconds : CostUnit::kernel_calls;
  const auto n_mcmc = cfg.get_uint("experiment.n_mcmc");
  const auto n_burnin = cfg.get_uint("experiment.n_burnin");
  const auto component = cfg.get_uint("experiment.component");
  if (n_mcmc <= n_burnin) throw ConfigError("experiment.n_mcmc must exceed experiment.n_burnin");
  const Experiment experiment = make_experiment(cfg, estimates_path.empty());
  if (component >= experiment.h_names.size()) throw ConfigError("experiment.component out of range");

  // The serial chain runs on a stream no replicate uses.
  RngStream s(cfg.get_uint("experiment.seed"), std::numeric_limits<std::uint64_t>::max());
  const auto start = std::chrono::steady_clock::now();
  const auto trace = experiment.serial(n_mcmc, s);
  const double serial_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::size_t dim = experiment.h_names.size();
  std::vector<double> chain(n_mcmc);
  for (std::size_t i = 0; i < n_mcmc; ++i) chain[i] = trace[i * dim + component];

  std::vector<double> values, costs;
  if (!estimates_path.empty()) {
    if (unit == CostUnit::seconds) throw ConfigError("--unit seconds needs freshly timed estimates, drop --estimates");
    for (const auto& e : read_estimates_csv(estimates_path).estimates) {
      values.push_back(e.value[static_cast<Eigen::Index>(component)]);
      costs.push_back(static_cast<double>(e.cost));
    }
  } else {
    const PipelineResult result = run_pipeline(cfg, "estimate");
    for (const auto& r : result.run.records) {
      if (r.censored) continue;
      values.push_back(r.h_values[component]);
      costs.push_back(unit == CostUnit::seconds ? r.wall_clock : static_cast<double>(r.cost));
    }
  }
  const VarianceReport report =
      inefficiency_report(chain, n_burnin, values, costs, unit,
                          unit == CostUnit::seconds ? std::optional<double>(serial_seconds) : std::nullopt);
  const std::filesystem::path dir = cfg.get_string("experiment.output");
  write_report_csv(dir / "inefficiency.csv", report);
  nlohmann::json j = {{"component", experiment.h_names[component]},
                      {"v_as", report.v_as},
                      {"n_mcmc", report.n_mcmc},
                      {"n_burnin", report.n_burnin},
                      {"cost_unit", to_string(report.unit)},
                      {"inefficiency_serial", report.inefficiency_serial},
                      {"inefficiency_unbiased", report.inefficiency_unbiased},
                      {"unbiased_variance", report.unbiased_variance},
                      {"unbiased_mean_cost", report.unbiased_mean_cost},
                      {"ratio", report.ratio}};
  atomic_write(dir / "inefficiency.json", j.dump(2) + '\n');
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cftp_check(int side, double beta, std::uint64_t samples, std::uint64_t seed, const std::string& output) {
  if (side < 1 || side * side > 20) throw ConfigError("--side must satisfy side * side <= 20 for enumeration");
  if (beta < 0.0) throw ConfigError("--beta must be >= 0");
  if (samples < 2) throw ConfigError("--samples must be >= 2");
  const auto exact = ising_exact_distribution(beta, side);
  std::vector<double> counts(exact.size(), 0.0);
  double m_sum = 0.0, m_sq = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    RngStream s(seed, i);
    const IsingLattice y = ising_cftp_sample(beta, side, s);
    counts[ising_index(y)] += 1.0;
    double m = 0.0;
    for (auto v : y.spins) m += v;
    m /= static_cast<double>(y.spins.size());
    m_sum += m;
    m_sq += m * m;
  }
  // Pool cells with expected count below 5 into one.
  const double n = static_cast<double>(samples);
  double chi2 = 0.0, pooled_obs = 0.0, pooled_exp = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double e = n * exact[i];
    if (e < 5.0) {
      pooled_obs += counts[i];
      pooled_exp += e;
      continue;
    }
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    chi2 += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  const double df = static_cast<double>(cells - 1);
  const double p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), chi2));
  const double mean = m_sum / n;
  const double var = (m_sq - n * mean * mean) / (n - 1.0);
  nlohmann::json j = {{"side", side},
                      {"beta", beta},
                      {"samples", samples},
                      {"chi_square", chi2},
                      {"df", df},
                      {"p_value", p_value},
                      {"magnetization_mean", mean},
                      {"magnetization_se", std::sqrt(var / n)}};
  if (!output.empty()) atomic_write(output, j.dump(2) + '\n');
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unbiased estimators from coupled MCMC chains"};
  app.require_subcommand(1);

  Overrides sim_o, meet_o, est_o, ineff_o;
  std::string sim_path;
  auto* sim = app.add_subcommand("simulate-data", "Simulate the configured model's dataset");
  add_config_options(sim, sim_o);
  sim->add_option("--data-output", sim_path, "Dataset file to write")->required();

  auto* meet = app.add_subcommand("meetings", "Sample meeting times");
  add_config_options(meet, meet_o);
  auto* est = app.add_subcommand("estimate", "Unbiased estimators H_{k:m} and their aggregate");
  add_config_options(est, est_o);

  std::string surv_input, surv_nmin = "auto", surv_output = "survival.csv";
  auto* surv = app.add_subcommand("survival", "Survival curve and polynomial tail bound from taus.csv");
  surv->add_option("--input", surv_input, "taus.csv")->required();
  surv->add_option("--nmin", surv_nmin, "Fit window start, or auto");
  surv->add_option("--output", surv_output, "Survival CSV to write");

  std::string ineff_estimates, ineff_unit = "kernel_calls";
  auto* ineff = app.add_subcommand("inefficiency", "Compare serial MCMC and unbiased-estimator inefficiency");
  add_config_options(ineff, ineff_o);
  ineff->add_option("--estimates", ineff_estimates, "Existing estimates.csv instead of running replicates");
  ineff->add_option("--unit", ineff_unit, "kernel_calls or seconds");

  int cftp_side = 3;
  double cftp_beta = 0.3;
  std::uint64_t cftp_samples = 100000, cftp_seed = 1;
  std::string cftp_output;
  auto* cftp = app.add_subcommand("ising-cftp-check", "Chi-square check of CFTP samples against enumeration");
  cftp->add_option("--side", cftp_side, "Lattice side");
  cftp->add_option("--beta", cftp_beta, "Inverse temperature");
  cftp->add_option("--samples", cftp_samples, "Number of perfect samples");
  cftp->add_option("--seed", cftp_seed, "Seed");
  cftp->add_option("--output", cftp_output, "JSON file to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*sim) return simulate_data(sim_o, sim_path);
    if (*meet) return run_pipeline_command(meet_o, "meetings");
    if (*est) return run_pipeline_command(est_o, "estimate");
    if (*surv) return survival(surv_input, surv_nmin, surv_output);
    if (*ineff) return inefficiency(ineff_o, ineff_estimates, ineff_unit);
    if (*cftp) return cftp_check(cftp_side, cftp_beta, cftp_samples, cftp_seed, cftp_output);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DataFormatError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
