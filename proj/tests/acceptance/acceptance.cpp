// One PASS/FAIL line per acceptance criterion. Pass criterion numbers as
// arguments to run a subset.
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "oracles.hpp"
#include "umcmc/diagnostics.hpp"
#include "umcmc/driver/config.hpp"
#include "umcmc/driver/experiment.hpp"
#include "umcmc/driver/pipeline.hpp"
#include "umcmc/driver/replicates.hpp"
#include "umcmc/kernels.hpp"
#include "umcmc/models/beta_bernoulli.hpp"
#include "umcmc/models/data_io.hpp"
#include "umcmc/models/ising.hpp"
#include "umcmc/models/lgssm.hpp"
#include "umcmc/models/toy.hpp"
#include "umcmc/unbiased.hpp"

using namespace umcmc;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path workdir() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "umcmc_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

ExperimentConfig config(const std::string& text) { return ExperimentConfig::parse_string(text); }

std::string toy_text(double sigma, std::size_t R, const std::string& kernel = "pm") {
  return fmt("[experiment]\nmodel = toy\nkernel = %s\nk = 50\nm = 500\nreplicates = %zu\nseed = 2024\n"
             "[proposal]\nsd = 1\n[toy]\nsigma = %.17g\n",
             kernel.c_str(), R, sigma);
}

RunResult run(const ExperimentConfig& cfg, bool estimator) {
  const Experiment ex = make_experiment(cfg, estimator);
  return run_replicates(estimator ? ex.replicate : ex.meeting, cfg.get_uint("experiment.replicates"), 1);
}

std::vector<std::size_t> taus_of(const RunResult& r) {
  std::vector<std::size_t> t;
  for (const auto& rec : r.records) t.push_back(rec.tau);
  return t;
}

testing::MeanSe component(const RunResult& r, std::size_t j) {
  std::vector<double> v;
  for (const auto& rec : r.records) v.push_back(rec.h_values.at(j));
  return testing::mean_se(v);
}

double survival_at(const std::vector<std::size_t>& taus, std::size_t n) {
  return static_cast<double>(std::count_if(taus.begin(), taus.end(), [n](std::size_t t) { return t > n; })) /
         static_cast<double>(taus.size());
}

// ---------------------------------------------------------------------------

Verdict toy_unbiasedness() {
  Verdict v{true, ""};
  for (double sigma : {0.0, 0.5, 1.0}) {
    const auto res = run(config(toy_text(sigma, 10000)), true);
    if (res.censored) v.pass = false;
    const double target[2] = {1.0, 2.0};
    for (std::size_t j = 0; j < 2; ++j) {
      const auto ms = component(res, j);
      const double z = (ms.mean - target[j]) / ms.se;
      v.pass = v.pass && std::abs(z) < 4.0;
      v.detail += fmt("s=%.1f th%zu=%.4f(z=%+.2f) ", sigma, j + 1, ms.mean, z);
    }
  }
  return v;
}

Verdict mh_reduction() {
  const auto mh = make_experiment(config(toy_text(0.0, 200, "mh")), true);
  const auto pm = make_experiment(config(toy_text(0.0, 200, "pm")), true);
  std::size_t mismatches = 0;
  for (std::uint64_t id = 0; id < 200; ++id) {
    const auto a = mh.replicate(id, {});
    const auto b = pm.replicate(id, {});
    if (a.tau != b.tau || a.cost != b.cost || a.value != b.value) ++mismatches;
  }
  RngStream s1(77, 0), s2(77, 0);
  const auto ta = mh.serial(20000, s1);
  const auto tb = pm.serial(20000, s2);
  const bool traces = ta == tb && s1.position() == s2.position();
  return {mismatches == 0 && traces,
          fmt("coupled mismatches=%zu/200 serial trace (20000 steps) identical=%s", mismatches, traces ? "yes" : "no")};
}

Verdict tail_ordering() {
  std::vector<std::vector<std::size_t>> taus;
  for (double sigma : {0.0, 1.0, 2.0}) taus.push_back(taus_of(run(config(toy_text(sigma, 10000)), false)));
  const std::size_t n = empirical_quantile(taus[0], 0.9);
  const double p0 = survival_at(taus[0], n), p1 = survival_at(taus[1], n), p2 = survival_at(taus[2], n);
  return {p0 < p1 && p1 < p2, fmt("n=%zu P(tau>n): s=0 %.4f, s=1 %.4f, s=2 %.4f", n, p0, p1, p2)};
}

Verdict beta_bernoulli_truth() {
  const std::string text =
      "[experiment]\nmodel = beta_bernoulli\nkernel = pm\nk = 50\nm = 500\nreplicates = 5000\nseed = 5\n"
      "[proposal]\nsd = 2\n[beta_bernoulli]\nalpha = 1\neps = 0.125\nparticles = 10\nT = 100\nbeta_true = 2\n";
  const auto cfg = config(text);
  const auto data_path = workdir() / "bb_y.txt";
  write_model_dataset(cfg, data_path.string());
  const auto y = read_integer_series(data_path);
  const double truth = testing::bb_posterior_mean(1.0, y, cfg.get_double("beta_bernoulli.beta_lo"),
                                                  cfg.get_double("beta_bernoulli.beta_hi"));
  const auto res = run(cfg, true);
  const auto ms = component(res, 0);
  const double z = (ms.mean - truth) / ms.se;
  const auto fit = fit_meeting_times(taus_of(res));
  const bool ok = res.censored == 0 && std::abs(z) < 4.0 && fit.fit_kappa < 9.0;
  return {ok, fmt("oracle=%.5f estimate=%.5f se=%.5f z=%+.2f  kappa'=%.3f (C=%.3g, window %zu..%zu)", truth, ms.mean,
                  ms.se, z, fit.fit_kappa, fit.fit_C, fit.n_min, fit.n_end)};
}

Verdict pf_unbiasedness() {
  RngStream sim(31, 0);
  const auto y = LinearGaussianSSM::simulate(0.5, 1.0, 10, sim);
  const double exact = kalman_log_lik(0.5, 1.0, y);
  const Vector theta = (Vector(2) << 0.5, 1.0).finished();
  Verdict v{true, ""};
  for (std::size_t N : {32, 128}) {
    const LinearGaussianSSM model(y, N);
    std::vector<double> ratio(10000);
    for (std::size_t r = 0; r < ratio.size(); ++r) {
      RngStream s(32 + N, r);
      ratio[r] = std::exp(model.log_lik_hat(theta, s) - exact);
    }
    const auto ms = testing::mean_se(ratio);
    const double z = (ms.mean - 1.0) / ms.se;
    v.pass = v.pass && std::abs(z) <= 3.0;
    v.detail += fmt("N=%zu mean=%.4f se=%.4f z=%+.2f  ", N, ms.mean, ms.se, z);
  }
  return v;
}

Verdict meeting_monotonicity() {
  std::vector<std::size_t> q90;
  Verdict v{true, ""};
  for (std::size_t N : {25, 50, 100}) {
    const std::string text = fmt(
        "[experiment]\nmodel = lgssm\nkernel = pm\nreplicates = 500\nseed = 6\n[proposal]\nsd = 0.2\n"
        "[lgssm]\nparticles = %zu\nT = 50\n",
        N);
    const auto res = run(config(text), false);
    if (res.censored) v.pass = false;
    q90.push_back(empirical_quantile(taus_of(res), 0.9));
    v.detail += fmt("N=%zu q90=%zu  ", N, q90.back());
  }
  v.pass = v.pass && q90[1] <= q90[0] && q90[2] <= q90[1];
  return v;
}

Verdict cftp_exactness() {
  const auto exact = ising_exact_distribution(0.3, 3);
  std::vector<double> counts(512, 0.0);
  const std::size_t n = 100000;
  for (std::uint64_t i = 0; i < n; ++i) {
    RngStream s(71, i);
    counts[ising_index(ising_cftp_sample(0.3, 3, s))] += 1.0;
  }
  double chi2 = 0.0;
  for (std::size_t i = 0; i < 512; ++i) {
    const double e = static_cast<double>(n) * exact[i];
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(511), chi2));
  std::vector<double> mag;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    RngStream s(72, i);
    const auto y = ising_cftp_sample(0.0, 3, s);
    double m = 0.0;
    for (auto spin : y.spins) m += spin;
    mag.push_back(m / 9.0);
  }
  const auto ms = testing::mean_se(mag);
  return {p > 1e-4 && std::abs(ms.mean) <= 3.0 * ms.se,
          fmt("chi2=%.1f df=511 p=%.4f; beta=0 magnetization %.4f (se %.4f)", chi2, p, ms.mean, ms.se)};
}

Verdict exchange_correctness() {
  const std::string text =
      "[experiment]\nmodel = ising\nkernel = exchange\nk = 100\nm = 1000\nreplicates = 2000\nseed = 8\n"
      "[proposal]\nsd = 0.1\n[ising]\nside = 4\nbeta_true = 0.3\n";
  const auto cfg = config(text);
  const auto data_path = workdir() / "ising_y.txt";
  write_model_dataset(cfg, data_path.string());
  const auto y = read_ising_lattice(data_path);
  const double beta_max = cfg.get_double("ising.beta_max");
  const testing::IsingPosterior post(y, beta_max);
  double truth = 0.0;
  const int bins = 50;
  const auto mass = post.bin_masses(bins, &truth);

  const Experiment ex = make_experiment(cfg, true);
  RngStream s(81, 0);
  const auto trace = ex.serial(1000000, s);
  std::vector<double> hist(bins, 0.0);
  for (double b : trace) hist[std::min(bins - 1, static_cast<int>(b / beta_max * bins))] += 1.0;
  double tv = 0.0;
  for (int i = 0; i < bins; ++i) tv += std::abs(hist[i] / static_cast<double>(trace.size()) - mass[i]);
  tv *= 0.5;

  const auto res = run_replicates(ex.replicate, 2000, 1);
  const auto ms = component(res, 0);
  const double z = (ms.mean - truth) / ms.se;
  return {tv < 0.02 && res.censored == 0 && std::abs(z) < 4.0,
          fmt("serial TV=%.4f (50 bins, 1e6 steps); oracle E[beta|y]=%.5f unbiased=%.5f se=%.5f z=%+.2f", tv, truth,
              ms.mean, ms.se, z)};
}

/// Counts every call into the kernel.
template <class K>
struct Counting {
  using State = typename K::State;
  const K* inner;
  mutable std::uint64_t calls = 0;
  State initial(RngStream& s) const { return inner->initial(s); }
  State step(const State& z, RngStream& s) const {
    ++calls;
    return inner->step(z, s);
  }
  std::pair<State, State> coupled_step(const State& a, const State& b, RngStream& s) const {
    calls += 2;
    return inner->coupled_step(a, b, s);
  }
};

Verdict estimator_identities() {
  const auto model = std::make_shared<const ToyNoisyNormal>(ToyNoisyNormal::default_mean(), 0.0);
  const PmKernel<ToyNoisyNormal> kernel(model, RandomWalkProposal::isotropic(2, 1.0), model->default_init());
  const auto h = [](const PmState& z) {
    return (Vector(3) << z.theta[0], z.theta[0] * z.theta[1], std::sin(z.theta[1])).finished();
  };
  const auto constant = [](const PmState&) { return Vector::Constant(2, 3.75); };
  double worst_decomp = 0.0, worst_ergodic = 0.0, worst_const = 0.0;
  std::size_t cost_mismatch = 0, short_runs = 0;
  RngStream pick(91, 0);
  for (std::uint64_t r = 0; r < 2000; ++r) {
    const std::size_t k = pick() % 20, m = k + pick() % 40;
    Counting<PmKernel<ToyNoisyNormal>> counted{&kernel};
    RngStream s(92, r);
    const auto traj = run_coupled(counted, h, k, m, s);
    const auto e = estimate(traj);
    const double scale = std::max(1.0, e.value.cwiseAbs().maxCoeff());
    worst_decomp = std::max(worst_decomp, (e.value - e.mcmc_part - e.bc_part).cwiseAbs().maxCoeff() / scale);
    if (traj.tau() <= k + 1) {
      ++short_runs;
      Vector avg = Vector::Zero(3);
      for (std::size_t l = k; l <= m; ++l) avg += Eigen::Map<const Vector>(traj.first(l).data(), 3);
      avg /= static_cast<double>(m - k + 1);
      worst_ergodic = std::max(worst_ergodic, (e.value - avg).cwiseAbs().maxCoeff() / scale);
    }
    if (counted.calls != cost(traj.tau(), m) || traj.kernel_calls() != counted.calls) ++cost_mismatch;
    RngStream s2(92, r);
    const auto c = h_k_m(run_coupled(kernel, constant, k, m, s2));
    worst_const = std::max(worst_const, (c.array() - 3.75).abs().maxCoeff() / 3.75);
  }
  const bool ok = worst_decomp <= 1e-12 && worst_ergodic <= 1e-12 && worst_const <= 1e-12 && cost_mismatch == 0 &&
                  short_runs > 0;
  return {ok, fmt("max rel err: decomposition %.1e, ergodic (%zu runs with tau<=k+1) %.1e, constant %.1e; "
                  "cost mismatches %zu/2000",
                  worst_decomp, short_runs, worst_ergodic, worst_const, cost_mismatch)};
}

template <class K>
std::string faithful(const K& kernel, std::uint64_t tag, std::size_t starts, std::size_t steps_each,
                     std::size_t* failures) {
  std::size_t equal_steps = 0;
  for (std::size_t i = 0; i < starts; ++i) {
    RngStream s(tag, i);
    auto z = kernel.initial(s);
    for (int j = 0; j < 5; ++j) z = kernel.step(z, s);
    for (std::size_t j = 0; j < steps_each; ++j) {
      const auto [a, b] = kernel.coupled_step(z, z, s);
      if (!(a == b)) ++*failures;
      ++equal_steps;
      z = kernel.step(a, s);
    }
  }
  // met chains stay together
  std::size_t separated = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    RngStream s(tag + 1, i);
    auto z1 = kernel.initial(s);
    auto z2 = z1;
    for (int j = 0; j < 1000; ++j) {
      std::tie(z1, z2) = kernel.coupled_step(z1, z2, s);
      if (!(z1 == z2)) {
        ++separated;
        break;
      }
    }
  }
  *failures += separated;
  return fmt("%zu random equal-state steps, %zu/10 separated in 1000 steps", equal_steps, separated);
}

Verdict faithfulness() {
  std::size_t failures = 0;
  std::string detail;
  {
    const ExactPosterior<ToyNoisyNormal> target{std::make_shared<const ToyNoisyNormal>()};
    const MhKernel k(target, RandomWalkProposal::isotropic(2, 1.0), ToyNoisyNormal().default_init());
    detail += "MH: " + faithful(k, 101, 1000, 10, &failures) + "; ";
  }
  {
    const auto model = std::make_shared<const ToyNoisyNormal>(ToyNoisyNormal::default_mean(), 1.0);
    const PmKernel<ToyNoisyNormal> k(model, RandomWalkProposal::isotropic(2, 1.0), model->default_init());
    detail += "PM: " + faithful(k, 103, 1000, 10, &failures) + "; ";
  }
  RngStream sim(105, 0);
  const auto y = BetaBernoulliModel::simulate(1.0, 2.0, 10, sim);
  {
    const auto model = std::make_shared<const BetaBernoulliModel>(1.0, y, 0.125, 10);
    const BlockPmKernel<BetaBernoulliModel> k(model, RandomWalkProposal::isotropic(1, 2.0), model->prior_init());
    detail += "block PM: " + faithful(k, 107, 1000, 10, &failures) + "; ";
  }
  {
    RngStream ys(109, 0);
    const auto model = std::make_shared<const IsingExchangeModel>(ising_cftp_sample(0.3, 4, ys));
    const ExchangeKernel<IsingExchangeModel> k(model, RandomWalkProposal::isotropic(1, 0.1), model->prior_init());
    detail += "exchange: " + faithful(k, 111, 1000, 10, &failures);
  }
  return {failures == 0, detail};
}

std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed) {
  RngStream s(seed, 0);
  std::vector<double> x(n);
  double v = s.normal() / std::sqrt(1.0 - phi * phi);
  for (auto& e : x) {
    v = phi * v + s.normal();
    e = v;
  }
  return x;
}

Verdict spectrum_calibration() {
  const double ar = spectrum_variance(ar1(0.5, 1000000, 121));
  const double white = spectrum_variance(ar1(0.0, 1000000, 122));
  return {ar >= 3.8 && ar <= 4.2 && white >= 0.95 && white <= 1.05,
          fmt("AR(1) phi=0.5 v_as=%.4f; white noise v_as=%.4f", ar, white)};
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const std::vector<std::pair<std::string, std::string>> experiments{
      {"estimate", toy_text(0.5, 300)},
      {"meetings",
       "[experiment]\nmodel = beta_bernoulli\nkernel = block_pm\nreplicates = 40\nseed = 3\n[proposal]\nsd = 2\n"
       "[beta_bernoulli]\neps = 0.125\nT = 20\n"},
      {"estimate",
       "[experiment]\nmodel = lgssm\nkernel = pm\nk = 20\nm = 60\nreplicates = 30\nseed = 4\n[proposal]\nsd = 0.2\n"
       "[lgssm]\nparticles = 50\nT = 30\n"},
      {"estimate",
       "[experiment]\nmodel = binomial_ssm\nkernel = pm\nk = 5\nm = 20\nreplicates = 20\nseed = 9\n"
       "[proposal]\nsd = 0.05,0.05\n[binomial_ssm]\nparticles = 32\nT = 40\n"},
      {"estimate",
       "[experiment]\nmodel = ising\nkernel = exchange\nk = 10\nm = 50\nreplicates = 40\nseed = 5\n"
       "[proposal]\nsd = 0.1\n[ising]\nside = 4\n"}};
  std::size_t differing = 0, files = 0;
  for (std::size_t e = 0; e < experiments.size(); ++e) {
    std::vector<std::uint64_t> reference;
    for (std::size_t workers : {1, 2, 4}) {
      auto cfg = config(experiments[e].second);
      const auto dir = workdir() / fmt("det_%zu_%zu", e, workers);
      cfg.set("experiment.output", dir.string());
      cfg.set("experiment.workers", std::to_string(workers));
      cfg.set("experiment.record_timing", "false");
      run_pipeline(cfg, experiments[e].first);
      std::vector<std::uint64_t> hashes;
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) hashes.push_back(fnv1a(entry.path().filename().string() + slurp(entry.path())));
      }
      std::sort(hashes.begin(), hashes.end());
      if (reference.empty()) {
        reference = hashes;
        files += hashes.size();
      } else if (hashes != reference) {
        ++differing;
      }
    }
  }
  return {differing == 0, fmt("%zu experiments x workers {1,2,4}, %zu output files compared by hash per worker count; %zu runs differ",
                              experiments.size(), files, differing)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "toy unbiasedness (sigma 0, 0.5, 1; R=1e4; k=50, m=500)", 300, toy_unbiasedness},
      {2, "PM with sigma=0 reproduces MH bit for bit", 60, mh_reduction},
      {3, "meeting-time tail ordering in sigma", 600, tail_ordering},
      {4, "Beta-Bernoulli posterior mean and tail exponent", 900, beta_bernoulli_truth},
      {5, "bootstrap particle filter unbiasedness", 300, pf_unbiasedness},
      {6, "meeting time non-increasing in particle count", 1800, meeting_monotonicity},
      {7, "CFTP exactness", 600, cftp_exactness},
      {8, "exchange algorithm correctness on a 4x4 Ising lattice", 3600, exchange_correctness},
      {9, "estimator identities", 60, estimator_identities},
      {10, "coupled kernel faithfulness", 300, faithfulness},
      {11, "spectral variance calibration", 60, spectrum_calibration},
      {12, "output determinism across worker counts", 600, determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = v.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] %2d %s | %s | %.1f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                secs, c.limit_seconds);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
