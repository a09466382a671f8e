#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "umcmc/diagnostics.hpp"
#include "umcmc/driver/config.hpp"
#include "umcmc/driver/pipeline.hpp"
#include "umcmc/models/beta_bernoulli.hpp"
#include "umcmc/models/ising.hpp"
#include "umcmc/models/lgssm.hpp"
#include "umcmc/models/toy.hpp"
#include "umcmc/rng.hpp"
#include "umcmc/unbiased.hpp"

namespace py = pybind11;
using namespace umcmc;

namespace {

std::vector<double> to_list(const Vector& v) { return {v.data(), v.data() + v.size()}; }

py::dict summary_dict(const Summary& s) {
  py::dict d;
  d["count"] = s.count;
  d["mean"] = to_list(s.mean);
  d["variance"] = to_list(s.variance);
  d["standard_error"] = to_list(s.standard_error);
  d["ci95_lower"] = to_list(s.ci_lower);
  d["ci95_upper"] = to_list(s.ci_upper);
  d["mean_cost"] = s.mean_cost;
  d["inefficiency"] = to_list(s.inefficiency);
  return d;
}

ExperimentConfig config_from(const std::string& text, const std::vector<std::string>& overrides) {
  ExperimentConfig cfg = ExperimentConfig::parse_string(text);
  for (const auto& o : overrides) cfg.apply_override(o);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Unbiased estimators from coupled MCMC chains";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id"))
      .def("raw", [](RngStream& s) { return s(); })
      .def("uniform", &RngStream::uniform)
      .def("normal", &RngStream::normal)
      .def_property_readonly("position", &RngStream::position);

  m.def("cost", &umcmc::cost, py::arg("tau"), py::arg("m"), "Kernel calls of one estimator: 2(tau-1) + max(1, m-tau+1)");

  m.def(
      "h_k_m",
      [](std::size_t k, std::size_t m, std::size_t tau, std::vector<double> first, std::vector<double> second) {
        const auto traj = CoupledTrajectory::from_values(k, m, tau, 1, std::move(first), std::move(second));
        const auto e = estimate(traj);
        return py::make_tuple(e.value[0], e.mcmc_part[0], e.bc_part[0]);
      },
      py::arg("k"), py::arg("m"), py::arg("tau"), py::arg("h_first"), py::arg("h_second"),
      "Scalar H_{k:m} from h along both chains; returns (value, mcmc_part, bc_part)");

  m.def(
      "aggregate",
      [](const std::vector<double>& values, const std::vector<std::uint64_t>& costs) {
        if (values.size() != costs.size()) throw std::invalid_argument("values and costs differ in length");
        std::vector<UnbiasedEstimate> es(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
          es[i].value = Vector::Constant(1, values[i]);
          es[i].cost = costs[i];
        }
        return summary_dict(aggregate(es));
      },
      py::arg("values"), py::arg("costs"));

  m.def(
      "empirical_survival",
      [](const std::vector<std::size_t>& taus, std::size_t n_max) { return empirical_survival(taus, n_max); },
      py::arg("taus"), py::arg("n_max"));
  m.def(
      "fit_polynomial_bound",
      [](const std::vector<double>& survival, std::size_t n_min) {
        const TailFit fit = fit_polynomial_bound(survival, n_min);
        py::dict d;
        d["C"] = fit.fit_C;
        d["kappa"] = fit.fit_kappa;
        d["n_min"] = fit.n_min;
        d["n_end"] = fit.n_end;
        d["super_polynomial"] = fit.super_polynomial;
        return d;
      },
      py::arg("survival"), py::arg("n_min"));
  m.def(
      "spectrum_variance", [](const std::vector<double>& x) { return spectrum_variance(x); }, py::arg("values"));

  m.def(
      "kalman_log_lik", [](double a, double sigma_x, const std::vector<double>& y) { return kalman_log_lik(a, sigma_x, y); },
      py::arg("a"), py::arg("sigma_x"), py::arg("y"));
  m.def(
      "lgssm_pf_log_lik",
      [](double a, double sigma_x, std::vector<double> y, std::size_t particles, std::uint64_t seed,
         std::uint64_t stream) {
        LinearGaussianSSM model(std::move(y), particles);
        RngStream s(seed, stream);
        return model.log_lik_hat((Vector(2) << a, sigma_x).finished(), s);
      },
      py::arg("a"), py::arg("sigma_x"), py::arg("y"), py::arg("particles"), py::arg("seed"), py::arg("stream"));
  m.def(
      "toy_log_lik_hat",
      [](const std::vector<double>& theta, double sigma, std::uint64_t seed, std::uint64_t stream) {
        ToyNoisyNormal model(ToyNoisyNormal::default_mean(), sigma);
        if (theta.size() != 2) throw DomainError("toy_log_lik_hat: theta must have two coordinates");
        RngStream s(seed, stream);
        return model.log_lik_hat(Eigen::Map<const Vector>(theta.data(), 2), s);
      },
      py::arg("theta"), py::arg("sigma"), py::arg("seed"), py::arg("stream"));
  m.def(
      "bb_exact_log_lik",
      [](double alpha, std::vector<int> y, double beta) {
        return BetaBernoulliModel(alpha, std::move(y), 0.0, 1).exact_log_lik(beta);
      },
      py::arg("alpha"), py::arg("y"), py::arg("beta"));
  m.def(
      "ising_cftp_sample",
      [](double beta, int side, std::uint64_t seed, std::uint64_t stream) {
        RngStream s(seed, stream);
        const IsingLattice y = ising_cftp_sample(beta, side, s);
        return std::vector<int>(y.spins.begin(), y.spins.end());
      },
      py::arg("beta"), py::arg("side"), py::arg("seed"), py::arg("stream"));
  m.def("ising_exact_distribution", &ising_exact_distribution, py::arg("beta"), py::arg("side"));

  m.def(
      "config_hash", [](const std::string& text, const std::vector<std::string>& overrides) {
        return config_from(text, overrides).hash();
      },
      py::arg("text"), py::arg("overrides") = std::vector<std::string>{});
  m.def(
      "run",
      [](const std::string& text, const std::string& command, const std::vector<std::string>& overrides) {
        const ExperimentConfig cfg = config_from(text, overrides);
        PipelineResult result;
        {
          py::gil_scoped_release release;
          result = run_pipeline(cfg, command);
        }
        py::dict d;
        d["exit_code"] = result.exit_code;
        d["report"] = py::module_::import("json").attr("loads")(result.report.dump());
        d["output_dir"] = result.output_dir.string();
        return d;
      },
      py::arg("config_text"), py::arg("command"), py::arg("overrides") = std::vector<std::string>{},
      "Run the meetings or estimate pipeline on a config given as text; files go to experiment.output");
}
