#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "umcmc/driver/config.hpp"
#include "umcmc/driver/experiment.hpp"
#include "umcmc/driver/output.hpp"
#include "umcmc/driver/pipeline.hpp"
#include "umcmc/driver/replicates.hpp"

using namespace umcmc;
namespace fs = std::filesystem;

namespace {

/// Chains meet at exactly n = 7 under the coupled step.
struct Tau7Kernel {
  using State = int;
  int initial(RngStream& s) const {
    s();
    return 0;
  }
  int step(int z, RngStream&) const { return z + 1; }
  std::pair<int, int> coupled_step(int a, int b, RngStream&) const {
    if (a + 1 == 7 || a == b) return {a + 1, a + 1};
    return {a + 1, b + 1};
  }
};

/// tau - 1 is geometric with success probability p.
struct GeometricKernel {
  using State = int;
  double p = 0.1;
  int initial(RngStream&) const { return 0; }
  int step(int z, RngStream&) const { return z + 1; }
  std::pair<int, int> coupled_step(int a, int b, RngStream& s) const {
    if (a == b || s.uniform() < p) return {a + 1, a + 1};
    return {a + 1, b + 1};
  }
};

const auto int_h = [](int z) { return Vector::Constant(1, static_cast<double>(z)); };

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("umcmc_driver_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig toy_config(const fs::path& out, std::size_t replicates, double sigma) {
  std::ostringstream text;
  text << "[experiment]\nmodel = toy\nkernel = pm\nk = 20\nm = 100\nreplicates = " << replicates
       << "\nseed = 11\nrecord_timing = false\noutput = " << out.string() << "\n[proposal]\nsd = 1.0\n[toy]\nsigma = "
       << sigma << "\n";
  return ExperimentConfig::parse_string(text.str());
}

}  // namespace

static_assert(CoupledChain<Tau7Kernel>);
static_assert(CoupledChain<GeometricKernel>);

TEST_CASE("config parsing is strict") {
  const std::string base = "[experiment]\nmodel = toy\nkernel = mh\nk = 1\nm = 2\nreplicates = 3\n[proposal]\nsd = 1\n";
  const auto cfg = ExperimentConfig::parse_string(base + "# comment\n; other\n");
  CHECK(cfg.get_uint("experiment.replicates") == 3);
  CHECK(cfg.get_doubles("toy.mean") == std::vector<double>{1.0, 2.0});
  CHECK_NOTHROW(cfg.validate(true));
  CHECK_THROWS_AS(ExperimentConfig::parse_string(base + "bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_string(base + "[experiment]\nk = 4\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_string("k = 4\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_string(base + "[toy]\nsigma\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_string(base + "[nosuch]\n"), ConfigError);

  auto missing_k = ExperimentConfig::parse_string(
      "[experiment]\nmodel = toy\nkernel = mh\nm = 2\nreplicates = 3\n[proposal]\nsd = 1\n");
  CHECK_THROWS_AS(missing_k.validate(true), ConfigError);
  CHECK_NOTHROW(missing_k.validate(false));

  auto bad = cfg;
  bad.set("experiment.k", "5");
  CHECK_THROWS_AS(bad.validate(true), ConfigError);
  bad = cfg;
  bad.set("experiment.kernel", "exchange");
  CHECK_THROWS_AS(bad.validate(true), ConfigError);
  bad = cfg;
  bad.set("experiment.replicates", "0");
  CHECK_THROWS_AS(bad.validate(true), ConfigError);
  bad = cfg;
  CHECK_THROWS_AS(bad.apply_override("experiment.k"), ConfigError);
  CHECK_THROWS_AS(bad.apply_override("experiment.nope=1"), ConfigError);
  CHECK_THROWS_AS(bad.get_double("experiment.model"), ConfigError);
}

TEST_CASE("config hash ignores workers and output") {
  auto a = toy_config("/tmp/a", 5, 0.5);
  auto b = toy_config("/tmp/b", 5, 0.5);
  b.set("experiment.workers", "7");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  b.set("experiment.seed", "12");
  CHECK(a.hash() != b.hash());
}

TEST_CASE("misconfiguration is rejected before work") {
  auto cfg = toy_config(scratch("reject"), 5, 0.5);
  cfg.set("proposal.sd", "-1");
  CHECK_THROWS_AS(make_experiment(cfg, true), ConfigError);
  cfg.set("proposal.sd", "1,2,3");
  CHECK_THROWS_AS(make_experiment(cfg, true), ConfigError);
  cfg.set("proposal.sd", "1");
  cfg.set("toy.sigma", "-0.5");
  CHECK_THROWS_AS(run_pipeline(cfg, "estimate"), ConfigError);
  CHECK_FALSE(fs::exists(fs::path(cfg.get_string("experiment.output")) / "taus.csv"));
}

TEST_CASE("replicates are identical for any worker count") {
  const auto fn = make_replicate_fn(std::make_shared<const GeometricKernel>(), int_h, 2, 6, 5, 1000);
  const auto one = run_replicates(fn, 50, 1);
  const auto three = run_replicates(fn, 50, 3);
  REQUIRE(one.records.size() == 50);
  REQUIRE(three.records.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(one.records[i].replicate_id == i);
    CHECK(one.records[i].tau == three.records[i].tau);
    CHECK(one.records[i].h_values == three.records[i].h_values);
    CHECK(one.records[i].cost == three.records[i].cost);
  }
}

TEST_CASE("budget shorter than any replicate gives one meeting per processor") {
  const auto fn = make_replicate_fn(std::make_shared<const Tau7Kernel>(), int_h, 0, 1, 1, 1000);
  const auto res = run_budgeted(fn, 3.0, 4, step_clocks(1.0));
  REQUIRE(res.records.size() == 4);
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(res.records[p].tau == 7);
    CHECK(res.records[p].worker_id == p);
    CHECK(res.records[p].replicate_id == p);
  }
  CHECK(res.discarded == 0);
}

TEST_CASE("in-flight replicate at expiry is discarded") {
  const auto fn = make_replicate_fn(std::make_shared<const Tau7Kernel>(), int_h, 0, 1, 1, 1000);
  // Each replicate costs 13 calls; budget 20 expires during the second.
  const auto res = run_budgeted(fn, 20.0, 2, step_clocks(1.0));
  CHECK(res.records.size() == 2);
  CHECK(res.discarded == 2);
  CHECK(res.discarded_seconds == doctest::Approx(2 * 7.0));
}

TEST_CASE("unbounded budget capped by R reduces to run_replicates") {
  const auto fn = make_replicate_fn(std::make_shared<const GeometricKernel>(), int_h, 2, 6, 9, 1000);
  const auto plain = run_replicates(fn, 40, 2);
  const auto budgeted = run_budgeted(fn, 1e300, 3, step_clocks(1.0), 40);
  REQUIRE(budgeted.records.size() == 40);
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(budgeted.records[i].replicate_id == i);
    CHECK(budgeted.records[i].tau == plain.records[i].tau);
    CHECK(budgeted.records[i].h_values == plain.records[i].h_values);
  }
}

TEST_CASE("budgeted survival matches plain survival") {
  const auto fn = make_replicate_fn(std::make_shared<const GeometricKernel>(), int_h, 0, 1, 13, 100000);
  const std::size_t P = 400;
  const auto budgeted = run_budgeted(fn, 40.0, P, step_clocks(1.0));
  const auto plain = run_replicates(fn, 20000, 1);
  for (std::size_t n : {2, 5, 10, 20, 30}) {
    std::vector<double> sum(P, 0.0), count(P, 0.0);
    for (const auto& rec : budgeted.records) {
      sum[rec.worker_id] += rec.tau > n ? 1.0 : 0.0;
      count[rec.worker_id] += 1.0;
    }
    std::vector<double> per_worker(P);
    for (std::size_t p = 0; p < P; ++p) {
      REQUIRE(count[p] >= 1.0);
      per_worker[p] = sum[p] / count[p];
    }
    std::vector<double> ind;
    for (const auto& rec : plain.records) ind.push_back(rec.tau > n ? 1.0 : 0.0);
    const auto a = testing::mean_se(per_worker);
    const auto b = testing::mean_se(ind);
    CHECK(std::abs(a.mean - b.mean) < 3.0 * std::hypot(a.se, b.se));
  }
}

TEST_CASE("pipeline output does not depend on worker count") {
  const auto d1 = scratch("det1");
  const auto d3 = scratch("det3");
  auto c1 = toy_config(d1, 30, 0.5);
  auto c3 = toy_config(d3, 30, 0.5);
  c3.set("experiment.workers", "3");
  REQUIRE(run_pipeline(c1, "estimate").exit_code == kExitOk);
  REQUIRE(run_pipeline(c3, "estimate").exit_code == kExitOk);
  for (const char* f : {"taus.csv", "estimates.csv", "survival.csv", "report.json", "manifest.json"}) {
    CHECK(slurp(d1 / f) == slurp(d3 / f));
  }
  CHECK_FALSE(fs::exists(d1 / "records.partial"));
}

TEST_CASE("pipeline resumes from a partial log") {
  const auto dir = scratch("resume");
  auto cfg = toy_config(dir, 12, 0.0);
  const auto full = run_pipeline(cfg, "meetings");
  REQUIRE(full.run.records.size() == 12);
  {
    PartialLog log(dir, cfg.hash(), "meetings");
    ReplicateRecord fake = full.run.records[0];
    fake.tau = 98765;
    log.append(fake);
    log.append(full.run.records[1]);
  }
  const auto resumed = run_pipeline(cfg, "meetings");
  CHECK(resumed.run.records[0].tau == 98765);
  for (std::size_t i = 1; i < 12; ++i) CHECK(resumed.run.records[i].tau == full.run.records[i].tau);
  CHECK_FALSE(fs::exists(dir / "records.partial"));

  {
    PartialLog log(dir, "0000000000000000", "meetings");
    ReplicateRecord fake = full.run.records[0];
    fake.tau = 98765;
    log.append(fake);
  }
  const auto fresh = run_pipeline(cfg, "meetings");
  CHECK(fresh.run.records[0].tau == full.run.records[0].tau);
}

TEST_CASE("censored replicates give exit code 3") {
  const auto dir = scratch("censor");
  auto cfg = toy_config(dir, 10, 2.0);
  cfg.set("experiment.n_max", "2");
  const auto res = run_pipeline(cfg, "meetings");
  CHECK(res.exit_code == kExitCensored);
  CHECK(res.run.censored > 0);
  const auto rows = read_taus_csv(dir / "taus.csv");
  CHECK(rows.size() == 10);
  cfg.set("experiment.max_censored", "10");
  CHECK(run_pipeline(cfg, "meetings").exit_code == kExitOk);
}

TEST_CASE("toy estimate recovers the target mean") {
  const auto dir = scratch("toy");
  auto cfg = toy_config(dir, 2000, 0.5);
  cfg.set("experiment.k", "50");
  cfg.set("experiment.m", "500");
  const auto res = run_pipeline(cfg, "estimate");
  REQUIRE(res.exit_code == kExitOk);
  const auto& summary = res.report["summary"];
  const auto mean = summary["mean"].get<std::vector<double>>();
  const auto se = summary["standard_error"].get<std::vector<double>>();
  CHECK(std::abs(mean[0] - 1.0) < 4.0 * se[0]);
  CHECK(std::abs(mean[1] - 2.0) < 4.0 * se[1]);
  const auto table = read_estimates_csv(dir / "estimates.csv");
  CHECK(table.estimates.size() == 2000);
  CHECK(table.h_names.size() == 2);
}
