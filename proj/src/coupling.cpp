#include "umcmc/coupling.hpp"

#include <atomic>

#include "umcmc/distributions.hpp"

namespace umcmc {

namespace {
std::atomic<std::uint64_t> g_cap_hits{0};
}

std::uint64_t coupling_cap_hits() { return g_cap_hits.load(std::memory_order_relaxed); }
void reset_coupling_cap_hits() { g_cap_hits.store(0, std::memory_order_relaxed); }
void record_coupling_cap_hit() { g_cap_hits.fetch_add(1, std::memory_order_relaxed); }

AcceptPair common_uniform_accept(double u, double log_alpha_1, double log_alpha_2) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("common_uniform_accept: u must lie in [0, 1]");
  const double log_u = std::log(u);
  return {log_u < log_alpha_1, log_u < log_alpha_2};
}

}  // namespace umcmc
