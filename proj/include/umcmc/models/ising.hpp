#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "umcmc/distributions.hpp"
#include "umcmc/kernels.hpp"
#include "umcmc/rng.hpp"

namespace umcmc {

/// (1/2) log(1 + sqrt 2), the infinite-lattice critical inverse temperature.
inline const double kIsingCriticalBeta = 0.5 * std::log(1.0 + std::sqrt(2.0));

/// Spins in {-1, +1} on an L x L grid with free boundaries, row-major.
struct IsingLattice {
  int side = 0;
  std::vector<std::int8_t> spins;

  static IsingLattice constant(int side, std::int8_t value);
  std::int8_t at(int row, int col) const { return spins[static_cast<std::size_t>(row * side + col)]; }
  bool operator==(const IsingLattice&) const = default;
};

/// Sum over undirected nearest-neighbour pairs of y_i y_j (each edge once).
long ising_interaction_sum(const IsingLattice& y);

/// beta * sum_{i~j} y_i y_j.
double ising_unnorm_log_density(const IsingLattice& y, double beta);

class CftpFailure : public std::runtime_error {
 public:
  explicit CftpFailure(const std::string& what) : std::runtime_error(what) {}
};

struct CftpOptions {
  /// First look-back horizon, in sweeps; doubled until coalescence.
  std::uint64_t t_start = 1;
  std::uint64_t t_cap = std::uint64_t{1} << 24;
};

struct CftpResult {
  IsingLattice sample;
  /// Look-back horizon at which the sandwich coalesced.
  std::uint64_t horizon = 0;
  /// Upper and lower chains at time 0 (identical on success).
  IsingLattice upper;
  IsingLattice lower;
};

/// Monotone CFTP with heat-bath sweeps. The random map for the sweep that
/// starts at time -t is driven by RngStream(map_key, t), so maps are reused
/// across doublings and the result does not depend on the doubling schedule.
CftpResult ising_cftp(double beta, int side, std::uint64_t map_key, const CftpOptions& options = {});

/// Exact draw from p(. | beta) proportional to exp(beta sum y_i y_j).
IsingLattice ising_cftp_sample(double beta, int side, RngStream& s, const CftpOptions& options = {});

/// Exchange-algorithm model for the inverse temperature, theta = (beta),
/// with prior U[0, beta_max].
class IsingExchangeModel {
 public:
  using Data = IsingLattice;

  explicit IsingExchangeModel(IsingLattice observed, double beta_max = kIsingCriticalBeta,
                              CftpOptions cftp = {});

  double log_prior(const Vector& theta) const;
  const IsingLattice& observed() const { return observed_; }
  double log_unnormalized(const IsingLattice& y, const Vector& theta) const {
    return theta[0] * static_cast<double>(ising_interaction_sum(y));
  }
  IsingLattice simulate(const Vector& theta, RngStream& s) const {
    return ising_cftp_sample(theta[0], observed_.side, s, cftp_);
  }
  double beta_max() const { return beta_max_; }
  InitialSampler prior_init() const;

 private:
  IsingLattice observed_;
  double beta_max_;
  CftpOptions cftp_;
};

/// Configuration with bit i of `index` set meaning site i (row-major) is +1.
IsingLattice ising_from_index(int side, std::uint64_t index);
std::uint64_t ising_index(const IsingLattice& y);

/// Number of configurations for each value of the interaction sum, by full
/// enumeration (side * side <= 25). Keys are interaction sums.
std::map<long, double> ising_density_of_states(int side);

/// log of the normalising constant sum_y exp(beta S(y)) from a density of states.
double ising_log_partition(const std::map<long, double>& density_of_states, double beta);

/// Exact probabilities of all 2^(side^2) configurations, indexed as above.
std::vector<double> ising_exact_distribution(double beta, int side);

}  // namespace umcmc
