#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "umcmc/rng.hpp"

namespace umcmc {

template <class T>
struct CoupledDraw {
  T x;
  T y;
  bool coupled = false;
  /// The residual loop hit its iteration cap; y is then the last rejected
  /// candidate rather than an exact draw from q.
  bool capped = false;
};

inline constexpr std::size_t kMaxCouplingIterations = 1'000'000;

/// Process-wide count of capped residual loops (diagnostics only).
std::uint64_t coupling_cap_hits();
void reset_coupling_cap_hits();
void record_coupling_cap_hit();

/// Maximal coupling of p and q by rejection.
///
/// X ~ p is kept as the common value with probability min(1, q(X)/p(X));
/// otherwise Y ~ q is redrawn until it lands in the part of q not covered by
/// p. `P` and `Q` are any laws with `sample(law, s)` and `log_density(law, x)`
/// overloads found by ADL.
template <class P, class Q>
auto maximal_coupling(const P& p, const Q& q, RngStream& s,
                      std::size_t max_iterations = kMaxCouplingIterations)
    -> CoupledDraw<decltype(sample(p, s))> {
  using T = decltype(sample(p, s));
  T x = sample(p, s);
  if (std::log(s.uniform()) + log_density(p, x) <= log_density(q, x)) {
    return {x, x, true, false};
  }
  T y = sample(q, s);
  for (std::size_t iter = 0;; ++iter) {
    if (std::log(s.uniform()) + log_density(q, y) > log_density(p, y)) {
      return {std::move(x), std::move(y), false, false};
    }
    if (iter + 1 >= max_iterations) break;
    y = sample(q, s);
  }
  record_coupling_cap_hit();
  return {std::move(x), std::move(y), false, true};
}

struct AcceptPair {
  bool first;
  bool second;
};

/// Accept/reject both chains with one shared uniform: accept_i iff ln u < log_alpha_i.
AcceptPair common_uniform_accept(double u, double log_alpha_1, double log_alpha_2);

}  // namespace umcmc
