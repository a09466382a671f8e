#include "umcmc/driver/experiment.hpp"

#include "umcmc/kernels.hpp"
#include "umcmc/models/beta_bernoulli.hpp"
#include "umcmc/models/binomial_ssm.hpp"
#include "umcmc/models/data_io.hpp"
#include "umcmc/models/ising.hpp"
#include "umcmc/models/lgssm.hpp"
#include "umcmc/models/toy.hpp"

namespace umcmc {

namespace {

struct ThetaOf {
  template <class State>
  Vector operator()(const State& z) const {
    return z.theta;
  }
};

std::vector<int> bb_data(const ExperimentConfig& cfg) {
  if (cfg.has("beta_bernoulli.data")) return read_integer_series(cfg.get_string("beta_bernoulli.data"));
  RngStream s(cfg.get_uint("beta_bernoulli.data_seed"), 0);
  return BetaBernoulliModel::simulate(cfg.get_double("beta_bernoulli.alpha"), cfg.get_double("beta_bernoulli.beta_true"),
                                      cfg.get_uint("beta_bernoulli.T"), s);
}

std::vector<double> lgssm_data(const ExperimentConfig& cfg) {
  if (cfg.has("lgssm.data")) return read_real_series(cfg.get_string("lgssm.data"));
  RngStream s(cfg.get_uint("lgssm.data_seed"), 0);
  return LinearGaussianSSM::simulate(cfg.get_double("lgssm.a_true"), cfg.get_double("lgssm.sigma_true"),
                                     cfg.get_uint("lgssm.T"), s);
}

std::vector<int> binomial_data(const ExperimentConfig& cfg) {
  if (cfg.has("binomial_ssm.data")) return read_integer_series(cfg.get_string("binomial_ssm.data"));
  RngStream s(cfg.get_uint("binomial_ssm.data_seed"), 0);
  return BinomialSSM::simulate(cfg.get_double("binomial_ssm.a_true"), cfg.get_double("binomial_ssm.sigma2_true"),
                               cfg.get_uint("binomial_ssm.T"), static_cast<int>(cfg.get_uint("binomial_ssm.trials")),
                               s);
}

IsingLattice ising_data(const ExperimentConfig& cfg) {
  if (cfg.has("ising.data")) return read_ising_lattice(cfg.get_string("ising.data"));
  RngStream s(cfg.get_uint("ising.data_seed"), 0);
  return ising_cftp_sample(cfg.get_double("ising.beta_true"), static_cast<int>(cfg.get_uint("ising.side")), s);
}

RandomWalkProposal make_proposal(const ExperimentConfig& cfg, Eigen::Index dim) {
  const auto sd = cfg.get_doubles("proposal.sd");
  if (sd.size() == 1) return RandomWalkProposal::isotropic(dim, sd[0]);
  if (static_cast<Eigen::Index>(sd.size()) != dim) {
    throw ConfigError("proposal.sd must have 1 or " + std::to_string(dim) + " entries");
  }
  return RandomWalkProposal::diagonal(Eigen::Map<const Vector>(sd.data(), dim));
}

template <class Model>
InitialSampler make_init(const ExperimentConfig& cfg, Eigen::Index dim, InitialSampler fallback,
                         std::shared_ptr<const Model> model) {
  const std::string kind = cfg.get_string("init.kind");
  if (kind == "default") return fallback;
  if (kind == "uniform") {
    const auto lo = cfg.get_doubles("init.lower");
    const auto hi = cfg.get_doubles("init.upper");
    if (static_cast<Eigen::Index>(lo.size()) != dim) throw ConfigError("init.lower has the wrong dimension");
    std::vector<Distribution> marginals;
    for (std::size_t i = 0; i < lo.size(); ++i) marginals.emplace_back(Uniform(lo[i], hi[i]));
    return independent_init(std::move(marginals));
  }
  const auto mean = cfg.get_doubles("init.mean");
  const auto sd = cfg.get_doubles("init.sd");
  if (static_cast<Eigen::Index>(mean.size()) != dim) throw ConfigError("init.mean has the wrong dimension");
  Vector mu = Eigen::Map<const Vector>(mean.data(), dim);
  Matrix cov = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) cov(i, i) = sd[static_cast<std::size_t>(i)] * sd[static_cast<std::size_t>(i)];
  // Truncated to the prior support by re-drawing.
  return truncated_init(MultivariateNormal(mu, cov),
                        [model](const Vector& x) { return std::isfinite(model->log_prior(x)); });
}

std::vector<std::string> names(std::initializer_list<const char*> list) { return {list.begin(), list.end()}; }

template <class Kernel>
void install(Experiment& out, std::shared_ptr<const Kernel> kernel, const ExperimentConfig& cfg, bool need_window) {
  const auto seed = cfg.get_uint("experiment.seed");
  const auto n_max = cfg.get_uint("experiment.n_max");
  if (need_window) {
    out.replicate = make_replicate_fn(kernel, ThetaOf{}, cfg.get_uint("experiment.k"), cfg.get_uint("experiment.m"),
                                      seed, n_max);
  }
  out.meeting = make_replicate_fn(kernel, ThetaOf{}, 0, 1, seed, n_max);
  out.serial = make_serial_fn(kernel, ThetaOf{});
}

template <class Model>
void install_pm_or_mh(Experiment& out, std::shared_ptr<const Model> model, RandomWalkProposal proposal,
                      InitialSampler init, const ExperimentConfig& cfg, bool need_window) {
  if (out.kernel == "mh") {
    auto kernel = std::make_shared<const MhKernel<ExactPosterior<Model>>>(ExactPosterior<Model>{model},
                                                                          std::move(proposal), std::move(init));
    install(out, kernel, cfg, need_window);
  } else {
    auto kernel = std::make_shared<const PmKernel<Model>>(model, std::move(proposal), std::move(init));
    install(out, kernel, cfg, need_window);
  }
}

}  // namespace

Experiment make_experiment(const ExperimentConfig& cfg, bool need_window) {
  cfg.validate(need_window);
  Experiment out;
  out.model = cfg.get_string("experiment.model");
  out.kernel = cfg.get_string("experiment.kernel");

  try {
    if (out.model == "toy") {
      const auto mean = cfg.get_doubles("toy.mean");
      auto model = std::make_shared<const ToyNoisyNormal>(Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size())),
                                                          cfg.get_double("toy.sigma"));
      const auto dim = static_cast<Eigen::Index>(mean.size());
      for (Eigen::Index i = 0; i < dim; ++i) out.h_names.push_back("theta" + std::to_string(i + 1));
      install_pm_or_mh(out, model, make_proposal(cfg, dim), make_init(cfg, dim, model->default_init(), model), cfg,
                       need_window);
    } else if (out.model == "beta_bernoulli") {
      auto model = std::make_shared<const BetaBernoulliModel>(
          cfg.get_double("beta_bernoulli.alpha"), bb_data(cfg), cfg.get_double("beta_bernoulli.eps"),
          cfg.get_uint("beta_bernoulli.particles"), cfg.get_double("beta_bernoulli.beta_lo"),
          cfg.get_double("beta_bernoulli.beta_hi"));
      out.h_names = names({"beta"});
      auto proposal = make_proposal(cfg, 1);
      auto init = make_init(cfg, 1, model->prior_init(), model);
      if (out.kernel == "block_pm") {
        auto kernel = std::make_shared<const BlockPmKernel<BetaBernoulliModel>>(model, std::move(proposal), std::move(init));
        install(out, kernel, cfg, need_window);
      } else {
        install_pm_or_mh(out, model, std::move(proposal), std::move(init), cfg, need_window);
      }
    } else if (out.model == "lgssm") {
      auto model = std::make_shared<const LinearGaussianSSM>(lgssm_data(cfg), cfg.get_uint("lgssm.particles"));
      out.h_names = names({"a", "sigma_x"});
      install_pm_or_mh(out, model, make_proposal(cfg, 2),
                       make_init(cfg, 2, independent_init({Uniform(0.0, 1.0), Uniform(0.0, 5.0)}), model), cfg,
                       need_window);
    } else if (out.model == "binomial_ssm") {
      auto model = std::make_shared<const BinomialSSM>(binomial_data(cfg),
                                                       static_cast<int>(cfg.get_uint("binomial_ssm.trials")),
                                                       cfg.get_uint("binomial_ssm.particles"));
      out.h_names = names({"a", "sigma2_x"});
      auto kernel = std::make_shared<const PmKernel<BinomialSSM>>(
          model, make_proposal(cfg, 2),
          make_init(cfg, 2, independent_init({Uniform(0.0, 1.0), InverseGamma(1.0, 0.1)}), model));
      install(out, kernel, cfg, need_window);
    } else {
      auto model = std::make_shared<const IsingExchangeModel>(ising_data(cfg), cfg.get_double("ising.beta_max"));
      out.h_names = names({"beta"});
      auto kernel = std::make_shared<const ExchangeKernel<IsingExchangeModel>>(
          model, make_proposal(cfg, 1), make_init(cfg, 1, model->prior_init(), model));
      install(out, kernel, cfg, need_window);
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid model parameters: ") + e.what());
  } catch (const DataFormatError& e) {
    throw ConfigError(std::string("invalid data file: ") + e.what());
  }
  return out;
}

void write_model_dataset(const ExperimentConfig& cfg, const std::string& path) {
  const std::string model = cfg.get_string("experiment.model");
  if (model == "beta_bernoulli") {
    write_integer_series(path, bb_data(cfg));
  } else if (model == "lgssm") {
    write_real_series(path, lgssm_data(cfg));
  } else if (model == "binomial_ssm") {
    write_integer_series(path, binomial_data(cfg));
  } else if (model == "ising") {
    write_ising_lattice(path, ising_data(cfg));
  } else {
    throw ConfigError("model " + model + " has no dataset");
  }
}

}  // namespace umcmc
