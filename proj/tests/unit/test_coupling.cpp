#include <doctest.h>

#include "helpers.hpp"
#include "umcmc/coupling.hpp"
#include "umcmc/distributions.hpp"

using namespace umcmc;

namespace {

double overlap_frequency(const Normal& p, const Normal& q, std::size_t n, std::uint64_t stream) {
  RngStream s(31, stream);
  std::size_t coupled = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = maximal_coupling(p, q, s);
    REQUIRE(d.coupled == (d.x == d.y));
    coupled += d.coupled ? 1 : 0;
  }
  return static_cast<double>(coupled) / static_cast<double>(n);
}

/// Overlap of two normals with equal sd: 2 Phi(-|m1 - m2| / (2 sd)).
/// Unequal sd by trapezoid quadrature of min(p, q).
double overlap_oracle(const Normal& p, const Normal& q) {
  const double lo = std::min(p.mean - 12 * p.sd, q.mean - 12 * q.sd);
  const double hi = std::max(p.mean + 12 * p.sd, q.mean + 12 * q.sd);
  const int steps = 400000;
  const double h = (hi - lo) / steps;
  double total = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + i * h;
    const double f = std::min(std::exp(log_density(p, x)), std::exp(log_density(q, x)));
    total += (i == 0 || i == steps) ? 0.5 * f : f;
  }
  return total * h;
}

}  // namespace

TEST_CASE("identical laws always couple") {
  CHECK(overlap_frequency(Normal(0, 1), Normal(0, 1), 10000, 1) == 1.0);
}

TEST_CASE("disjoint supports never couple") {
  RngStream s(31, 2);
  for (int i = 0; i < 10000; ++i) {
    const auto d = maximal_coupling(Uniform(0, 1), Uniform(2, 3), s);
    CHECK_FALSE(d.coupled);
    CHECK(d.x < 1.0);
    CHECK(d.y > 2.0);
  }
}

TEST_CASE("coupling probability of N(0,1) and N(1,1)") {
  const double oracle = 2.0 * testing::normal_cdf(-0.5);
  CHECK(oracle == doctest::Approx(0.6170750774519738).epsilon(1e-12));
  CHECK(overlap_oracle(Normal(0, 1), Normal(1, 1)) == doctest::Approx(oracle).epsilon(1e-8));
  CHECK(std::abs(overlap_frequency(Normal(0, 1), Normal(1, 1), 100000, 3) - 0.6171) < 0.005);
}

TEST_CASE("coupling frequency is maximal for several pairs") {
  const std::vector<std::pair<Normal, Normal>> pairs{{Normal(0, 1), Normal(0.3, 1)},
                                                     {Normal(0, 1), Normal(2, 1)},
                                                     {Normal(0, 1), Normal(0, 2)},
                                                     {Normal(-1, 0.5), Normal(1, 1.5)},
                                                     {Normal(0, 1), Normal(4, 1)}};
  std::uint64_t stream = 10;
  for (const auto& [p, q] : pairs) {
    const double oracle = overlap_oracle(p, q);
    const std::size_t n = 50000;
    const double freq = overlap_frequency(p, q, n, stream++);
    const double se = std::sqrt(oracle * (1 - oracle) / n);
    CHECK(std::abs(freq - oracle) < 3.0 * se + 1e-12);
  }
}

TEST_CASE("marginals of the coupling are p and q") {
  const Normal p(0, 1);
  for (const Normal q : {Normal(1, 1), Normal(3, 0.5), Normal(0, 2)}) {
    RngStream s(32, static_cast<std::uint64_t>(q.mean * 10 + q.sd));
    std::vector<double> xs, ys;
    for (int i = 0; i < 100000; ++i) {
      const auto d = maximal_coupling(p, q, s);
      xs.push_back(d.x);
      ys.push_back(d.y);
    }
    CHECK(testing::ks_pvalue(xs, [](double x) { return testing::normal_cdf(x); }) > 1e-4);
    CHECK(testing::ks_pvalue(ys, [q](double y) { return testing::normal_cdf((y - q.mean) / q.sd); }) > 1e-4);
  }
}

TEST_CASE("iteration cap is counted") {
  reset_coupling_cap_hits();
  RngStream s(33, 0);
  // Nearly identical laws: the residual part of q is tiny, so residual draws
  // are almost always rejected and a cap of one iteration is hit.
  std::uint64_t capped = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto d = maximal_coupling(Normal(0, 1), Normal(0.01, 1), s, 1);
    if (d.capped) {
      CHECK_FALSE(d.coupled);
      ++capped;
    }
  }
  CHECK(capped >= 1);
  CHECK(coupling_cap_hits() == capped);
}

TEST_CASE("common uniform acceptance examples") {
  auto a = common_uniform_accept(0.5, 0.0, 0.0);
  CHECK((a.first && a.second));
  a = common_uniform_accept(0.5, std::log(0.6), std::log(0.4));
  CHECK(a.first);
  CHECK_FALSE(a.second);
  a = common_uniform_accept(0.99, std::log(0.5), std::log(0.5));
  CHECK_FALSE(a.first);
  CHECK_FALSE(a.second);
  CHECK_THROWS(common_uniform_accept(1.5, 0.0, 0.0));
}

TEST_CASE("common uniform acceptances are monotone") {
  RngStream s(34, 0);
  for (int i = 0; i < 100000; ++i) {
    const double l1 = std::log(s.uniform()) * 2;
    const double l2 = l1 + std::abs(s.normal());
    const auto a = common_uniform_accept(s.uniform(), l1, l2);
    if (a.first) CHECK(a.second);
  }
}
