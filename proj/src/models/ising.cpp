#include "umcmc/models/ising.hpp"

#include <array>

namespace umcmc {

IsingLattice IsingLattice::constant(int side, std::int8_t value) {
  if (side < 1) throw DomainError("Ising: side must be >= 1");
  return {side, std::vector<std::int8_t>(static_cast<std::size_t>(side * side), value)};
}

long ising_interaction_sum(const IsingLattice& y) {
  const int L = y.side;
  long total = 0;
  for (int r = 0; r < L; ++r) {
    for (int c = 0; c < L; ++c) {
      const int v = y.at(r, c);
      if (c + 1 < L) total += v * y.at(r, c + 1);
      if (r + 1 < L) total += v * y.at(r + 1, c);
    }
  }
  return total;
}

double ising_unnorm_log_density(const IsingLattice& y, double beta) {
  return beta * static_cast<double>(ising_interaction_sum(y));
}

namespace {

int local_field(const std::vector<std::int8_t>& s, int L, int r, int c) {
  int h = 0;
  const std::size_t i = static_cast<std::size_t>(r * L + c);
  if (c > 0) h += s[i - 1];
  if (c + 1 < L) h += s[i + 1];
  if (r > 0) h += s[i - static_cast<std::size_t>(L)];
  if (r + 1 < L) h += s[i + static_cast<std::size_t>(L)];
  return h;
}

}  // namespace

CftpResult ising_cftp(double beta, int side, std::uint64_t map_key, const CftpOptions& options) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("Ising CFTP: requires beta >= 0");
  if (side < 1) throw DomainError("Ising CFTP: side must be >= 1");
  if (options.t_start < 1) throw DomainError("Ising CFTP: t_start must be >= 1");

  // P(spin = +1 | local field h) for h in {-4, ..., 4}.
  std::array<double, 9> p_plus{};
  for (int h = -4; h <= 4; ++h) p_plus[static_cast<std::size_t>(h + 4)] = 1.0 / (1.0 + std::exp(-2.0 * beta * h));

  CftpResult out;
  for (std::uint64_t horizon = options.t_start;; horizon *= 2) {
    IsingLattice upper = IsingLattice::constant(side, 1);
    IsingLattice lower = IsingLattice::constant(side, -1);
    for (std::uint64_t t = horizon; t >= 1; --t) {
      RngStream sweep(map_key, t);
      for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
          const double u = sweep.uniform();
          const std::size_t i = static_cast<std::size_t>(r * side + c);
          upper.spins[i] = u < p_plus[static_cast<std::size_t>(local_field(upper.spins, side, r, c) + 4)] ? 1 : -1;
          lower.spins[i] = u < p_plus[static_cast<std::size_t>(local_field(lower.spins, side, r, c) + 4)] ? 1 : -1;
        }
      }
    }
    if (upper == lower) {
      out.sample = upper;
      out.horizon = horizon;
      out.upper = std::move(upper);
      out.lower = std::move(lower);
      return out;
    }
    if (horizon >= options.t_cap) {
      throw CftpFailure("Ising CFTP: no coalescence within the horizon cap");
    }
  }
}

IsingLattice ising_cftp_sample(double beta, int side, RngStream& s, const CftpOptions& options) {
  return ising_cftp(beta, side, s.child_key(), options).sample;
}

IsingExchangeModel::IsingExchangeModel(IsingLattice observed, double beta_max, CftpOptions cftp)
    : observed_(std::move(observed)), beta_max_(beta_max), cftp_(cftp) {
  if (observed_.side < 1 || observed_.spins.size() != static_cast<std::size_t>(observed_.side * observed_.side)) {
    throw DomainError("Ising exchange: malformed observed lattice");
  }
  for (auto v : observed_.spins) {
    if (v != 1 && v != -1) throw DomainError("Ising exchange: spins must be +1 or -1");
  }
  if (!(beta_max_ > 0.0)) throw DomainError("Ising exchange: beta_max must be positive");
}

double IsingExchangeModel::log_prior(const Vector& theta) const {
  return log_density(Uniform(0.0, beta_max_), theta[0]);
}

InitialSampler IsingExchangeModel::prior_init() const { return independent_init({Uniform(0.0, beta_max_)}); }

IsingLattice ising_from_index(int side, std::uint64_t index) {
  IsingLattice y = IsingLattice::constant(side, -1);
  for (std::size_t i = 0; i < y.spins.size(); ++i) {
    if ((index >> i) & 1U) y.spins[i] = 1;
  }
  return y;
}

std::uint64_t ising_index(const IsingLattice& y) {
  if (y.spins.size() > 64) throw DomainError("Ising: lattice too large to index");
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < y.spins.size(); ++i) {
    if (y.spins[i] > 0) index |= std::uint64_t{1} << i;
  }
  return index;
}

std::map<long, double> ising_density_of_states(int side) {
  if (side < 1 || side * side > 25) throw DomainError("Ising: enumeration needs side * side <= 25");
  const std::uint64_t states = std::uint64_t{1} << (side * side);
  std::map<long, double> counts;
  for (std::uint64_t i = 0; i < states; ++i) counts[ising_interaction_sum(ising_from_index(side, i))] += 1.0;
  return counts;
}

double ising_log_partition(const std::map<long, double>& dos, double beta) {
  std::vector<double> terms;
  terms.reserve(dos.size());
  for (const auto& [sum, count] : dos) terms.push_back(std::log(count) + beta * static_cast<double>(sum));
  return log_sum_exp(terms.data(), terms.size());
}

std::vector<double> ising_exact_distribution(double beta, int side) {
  const double log_z = ising_log_partition(ising_density_of_states(side), beta);
  const std::uint64_t states = std::uint64_t{1} << (side * side);
  std::vector<double> p(states);
  for (std::uint64_t i = 0; i < states; ++i) {
    p[i] = std::exp(beta * static_cast<double>(ising_interaction_sum(ising_from_index(side, i))) - log_z);
  }
  return p;
}

}  // namespace umcmc
