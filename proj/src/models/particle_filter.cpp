#include "umcmc/models/particle_filter.hpp"

#include <numeric>

namespace umcmc {

void multinomial_resample(const std::vector<double>& weights, RngStream& s, std::vector<std::size_t>& ancestors) {
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  const double total = cumulative.back();
  const std::size_t last = weights.size() - 1;
  for (auto& a : ancestors) {
    const double u = s.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    a = std::min(static_cast<std::size_t>(it - cumulative.begin()), last);
  }
}

}  // namespace umcmc
