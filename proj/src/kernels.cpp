#include "umcmc/kernels.hpp"

#include <numbers>

namespace umcmc {

RandomWalkProposal::RandomWalkProposal(Matrix covariance) : covariance_(std::move(covariance)) {
  // Reuse the validation of the Gaussian law.
  const MultivariateNormal law(Vector::Zero(covariance_.rows()), covariance_);
  chol_ = law.cholesky();
  log_det_ = law.log_det();
}

RandomWalkProposal RandomWalkProposal::isotropic(Eigen::Index dim, double sd) {
  return RandomWalkProposal(Matrix::Identity(dim, dim) * (sd * sd));
}

RandomWalkProposal RandomWalkProposal::diagonal(const Vector& sds) {
  return RandomWalkProposal(sds.array().square().matrix().asDiagonal().toDenseMatrix());
}

Vector RandomWalkProposal::draw(const Vector& center, RngStream& s) const {
  Vector z(center.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = s.normal();
  return center + chol_ * z;
}

double RandomWalkProposal::log_density(const Vector& center, const Vector& x) const {
  constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
  const Vector z = chol_.triangularView<Eigen::Lower>().solve(x - center);
  return -0.5 * (static_cast<double>(dim()) * kLogTwoPi + log_det_ + z.squaredNorm());
}

InitialSampler independent_init(std::vector<Distribution> marginals) {
  for (const auto& d : marginals) {
    if (dimension(d) != 1) throw DomainError("independent_init: marginals must be scalar laws");
  }
  return [marginals = std::move(marginals)](RngStream& s) {
    Vector theta(static_cast<Eigen::Index>(marginals.size()));
    for (std::size_t i = 0; i < marginals.size(); ++i) theta[static_cast<Eigen::Index>(i)] = sample(marginals[i], s)[0];
    return theta;
  };
}

InitialSampler truncated_init(Distribution law, std::function<bool(const Vector&)> accept, std::size_t max_tries) {
  return [law = std::move(law), accept = std::move(accept), max_tries](RngStream& s) {
    for (std::size_t i = 0; i < max_tries; ++i) {
      Vector theta = sample(law, s);
      if (accept(theta)) return theta;
    }
    throw InvariantViolation("truncated_init: no draw inside the support after max_tries");
  };
}

}  // namespace umcmc
