#include "umcmc/unbiased.hpp"

#include <algorithm>
#include <cmath>

namespace umcmc {

CoupledTrajectory CoupledTrajectory::from_values(std::size_t k, std::size_t m, std::size_t tau, std::size_t dim,
                                                 std::vector<double> h_first, std::vector<double> h_second) {
  if (k > m) throw std::invalid_argument("trajectory: requires k <= m");
  if (tau < 1 || dim == 0) throw std::invalid_argument("trajectory: requires tau >= 1 and dim >= 1");
  const std::size_t horizon = std::max(m, tau);
  if (h_first.size() != (horizon + 1) * dim || h_second.size() != horizon * dim) {
    throw std::invalid_argument("trajectory: h-value lengths inconsistent with max(m, tau)");
  }
  CoupledTrajectory traj;
  traj.k_ = k;
  traj.m_ = m;
  traj.tau_ = tau;
  traj.dim_ = dim;
  traj.iterations_ = horizon;
  traj.kernel_calls_ = cost(tau, m);
  traj.status_ = TrajectoryStatus::met;
  traj.h_first_ = std::move(h_first);
  traj.h_second_ = std::move(h_second);
  return traj;
}

std::uint64_t cost(std::size_t tau, std::size_t m) {
  if (tau < 1) throw std::invalid_argument("cost: requires tau >= 1");
  const auto t = static_cast<std::int64_t>(tau);
  const auto mm = static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(2 * (t - 1) + std::max<std::int64_t>(1, mm - t + 1));
}

UnbiasedEstimate estimate(const CoupledTrajectory& traj) {
  if (!traj.met()) {
    throw CensoredTrajectoryError(traj.status() == TrajectoryStatus::censored
                                      ? "estimator requested for a censored trajectory"
                                      : "estimator requested for an interrupted trajectory");
  }
  const std::size_t dim = traj.dim();
  const std::size_t k = traj.k();
  const std::size_t m = traj.m();
  const std::size_t tau = traj.tau();
  const double span = static_cast<double>(m - k + 1);

  UnbiasedEstimate out;
  out.mcmc_part = Vector::Zero(static_cast<Eigen::Index>(dim));
  out.bc_part = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t l = k; l <= m; ++l) {
    const auto row = traj.first(l);
    for (std::size_t j = 0; j < dim; ++j) out.mcmc_part[static_cast<Eigen::Index>(j)] += row[j];
  }
  out.mcmc_part /= span;
  for (std::size_t n = k + 1; n + 1 <= tau; ++n) {
    const double weight = std::min(1.0, static_cast<double>(n - k) / span);
    const auto a = traj.first(n);
    const auto b = traj.second(n - 1);
    for (std::size_t j = 0; j < dim; ++j) out.bc_part[static_cast<Eigen::Index>(j)] += weight * (a[j] - b[j]);
  }
  out.value = out.mcmc_part + out.bc_part;
  out.tau = tau;
  out.cost = cost(tau, m);
  return out;
}

Vector h_k_m(const CoupledTrajectory& traj) { return estimate(traj).value; }

Summary aggregate(std::span<const UnbiasedEstimate> estimates) {
  if (estimates.size() < 2) throw std::invalid_argument("aggregate: requires at least two estimates");
  const auto dim = estimates.front().value.size();
  const double r = static_cast<double>(estimates.size());

  Summary out;
  out.count = estimates.size();
  out.mean = Vector::Zero(dim);
  double cost_sum = 0.0;
  for (const auto& e : estimates) {
    if (e.value.size() != dim) throw std::invalid_argument("aggregate: estimates differ in dimension");
    out.mean += e.value;
    cost_sum += static_cast<double>(e.cost);
  }
  out.mean /= r;
  out.mean_cost = cost_sum / r;

  out.variance = Vector::Zero(dim);
  for (const auto& e : estimates) out.variance += (e.value - out.mean).array().square().matrix();
  out.variance /= (r - 1.0);

  constexpr double kZ975 = 1.959963984540054;
  out.standard_error = (out.variance / r).array().sqrt().matrix();
  out.ci_lower = out.mean - kZ975 * out.standard_error;
  out.ci_upper = out.mean + kZ975 * out.standard_error;
  out.inefficiency = out.mean_cost * out.variance;
  return out;
}

}  // namespace umcmc
