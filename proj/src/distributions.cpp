#include "umcmc/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace umcmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

// log(x) * (a - 1) with the convention 0 * log(0) = 0 when a == 1.
double power_term(double a_minus_one, double x) {
  if (a_minus_one == 0.0) return 0.0;
  return a_minus_one * std::log(x);
}

}  // namespace

Normal::Normal(double mean_, double sd_) : mean(mean_), sd(sd_) {
  require(std::isfinite(mean) && positive_finite(sd), "Normal: sd must be positive and finite");
}

Uniform::Uniform(double lo_, double hi_) : lo(lo_), hi(hi_) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "Uniform: requires finite lo < hi");
}

Beta::Beta(double a_, double b_) : a(a_), b(b_) {
  require(positive_finite(a) && positive_finite(b), "Beta: shapes must be positive");
}

Gamma::Gamma(double shape_, double rate_) : shape(shape_), rate(rate_) {
  require(positive_finite(shape) && positive_finite(rate), "Gamma: shape and rate must be positive");
}

InverseGamma::InverseGamma(double shape_, double scale_) : shape(shape_), scale(scale_) {
  require(positive_finite(shape) && positive_finite(scale),
          "InverseGamma: shape and scale must be positive");
}

LogNormal::LogNormal(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
  require(std::isfinite(mu) && positive_finite(sigma), "LogNormal: sigma must be positive");
}

Binomial::Binomial(std::int64_t n_, double p_) : n(n_), p(p_) {
  require(n >= 0 && p >= 0.0 && p <= 1.0, "Binomial: requires n >= 0 and p in [0, 1]");
}

MultivariateNormal::MultivariateNormal(Vector mean, Matrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  require(covariance_.rows() == mean_.size() && covariance_.cols() == mean_.size() && mean_.size() > 0,
          "MultivariateNormal: dimension mismatch");
  require(mean_.allFinite() && covariance_.allFinite(), "MultivariateNormal: non-finite parameters");
  const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
  require((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "MultivariateNormal: covariance must be symmetric");
  Eigen::LLT<Matrix> llt(covariance_);
  require(llt.info() == Eigen::Success, "MultivariateNormal: covariance must be positive definite");
  chol_ = llt.matrixL();
  require((chol_.diagonal().array() > 0.0).all(), "MultivariateNormal: covariance must be positive definite");
  log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

MultivariateNormal MultivariateNormal::diagonal(Vector mean, const Vector& variances) {
  return MultivariateNormal(std::move(mean), variances.asDiagonal().toDenseMatrix());
}

double standard_gamma(double shape, RngStream& s) {
  if (shape < 1.0) {
    // Boost to shape + 1 and rescale by U^{1/shape}.
    const double g = standard_gamma(shape + 1.0, s);
    return g * std::pow(s.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = s.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = s.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d - d * v + d * std::log(v)) return d * v;
  }
}

double sample(const Normal& d, RngStream& s) { return d.mean + d.sd * s.normal(); }

double sample(const Uniform& d, RngStream& s) {
  const double x = d.lo + (d.hi - d.lo) * s.uniform();
  return std::clamp(x, d.lo, d.hi);
}

double sample(const Beta& d, RngStream& s) {
  const double x = standard_gamma(d.a, s);
  const double y = standard_gamma(d.b, s);
  return x / (x + y);
}

double sample(const Gamma& d, RngStream& s) { return standard_gamma(d.shape, s) / d.rate; }

double sample(const InverseGamma& d, RngStream& s) { return d.scale / standard_gamma(d.shape, s); }

double sample(const LogNormal& d, RngStream& s) { return std::exp(d.mu + d.sigma * s.normal()); }

namespace {

// Sequential-search inversion; exact but O(n p), used for moderate n.
std::int64_t binomial_inversion(std::int64_t n, double p, RngStream& s) {
  if (p == 0.0 || n == 0) return 0;
  if (p > 0.5) return n - binomial_inversion(n, 1.0 - p, s);
  const double q = 1.0 - p;
  const double ratio = p / q;
  double f = std::pow(q, static_cast<double>(n));
  double u = s.uniform();
  std::int64_t k = 0;
  while (u > f && k < n) {
    u -= f;
    ++k;
    f *= ratio * static_cast<double>(n - k + 1) / static_cast<double>(k);
  }
  return k;
}

}  // namespace

double sample(const Binomial& d, RngStream& s) {
  // Sum of chunks keeps q^n away from underflow; a sum of independent
  // Binomial(n_i, p) is Binomial(sum n_i, p).
  constexpr std::int64_t kChunk = 512;
  std::int64_t total = 0;
  for (std::int64_t left = d.n; left > 0; left -= kChunk) {
    total += binomial_inversion(std::min(left, kChunk), d.p, s);
  }
  return static_cast<double>(total);
}

Vector sample(const MultivariateNormal& d, RngStream& s) {
  Vector z(d.dim());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = s.normal();
  return d.mean() + d.cholesky() * z;
}

double log_density(const Normal& d, double x) {
  const double z = (x - d.mean) / d.sd;
  return -0.5 * kLogTwoPi - std::log(d.sd) - 0.5 * z * z;
}

double log_density(const Uniform& d, double x) {
  if (!(x >= d.lo && x <= d.hi)) return kNegInf;
  return -std::log(d.hi - d.lo);
}

double log_density(const Beta& d, double x) {
  if (!(x >= 0.0 && x <= 1.0)) return kNegInf;
  const double lbeta = std::lgamma(d.a) + std::lgamma(d.b) - std::lgamma(d.a + d.b);
  return power_term(d.a - 1.0, x) + power_term(d.b - 1.0, 1.0 - x) - lbeta;
}

double log_density(const Gamma& d, double x) {
  if (!(x >= 0.0) || std::isinf(x)) return kNegInf;
  return d.shape * std::log(d.rate) - std::lgamma(d.shape) + power_term(d.shape - 1.0, x) - d.rate * x;
}

double log_density(const InverseGamma& d, double x) {
  if (!(x > 0.0) || std::isinf(x)) return kNegInf;
  return d.shape * std::log(d.scale) - std::lgamma(d.shape) - (d.shape + 1.0) * std::log(x) - d.scale / x;
}

double log_density(const LogNormal& d, double x) {
  if (!(x > 0.0) || std::isinf(x)) return kNegInf;
  const double lx = std::log(x);
  const double z = (lx - d.mu) / d.sigma;
  return -0.5 * kLogTwoPi - std::log(d.sigma) - lx - 0.5 * z * z;
}

double log_density(const Binomial& d, double x) {
  if (!(x >= 0.0 && x <= static_cast<double>(d.n)) || x != std::floor(x)) return kNegInf;
  const double n = static_cast<double>(d.n);
  const double lchoose = std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0);
  double out = lchoose;
  if (x > 0.0) out += (d.p > 0.0) ? x * std::log(d.p) : kNegInf;
  if (n - x > 0.0) out += (d.p < 1.0) ? (n - x) * std::log1p(-d.p) : kNegInf;
  return out;
}

double log_density(const MultivariateNormal& d, const Vector& x) {
  if (x.size() != d.dim()) throw DomainError("MultivariateNormal: point has wrong dimension");
  const Vector z = d.cholesky().triangularView<Eigen::Lower>().solve(x - d.mean());
  return -0.5 * (static_cast<double>(d.dim()) * kLogTwoPi + d.log_det() + z.squaredNorm());
}

Vector sample(const Distribution& d, RngStream& s) {
  return std::visit(
      [&s](const auto& law) -> Vector {
        using Law = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<Law, MultivariateNormal>) {
          return sample(law, s);
        } else {
          return Vector::Constant(1, sample(law, s));
        }
      },
      d);
}

double log_density(const Distribution& d, const Vector& x) {
  return std::visit(
      [&x](const auto& law) -> double {
        using Law = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<Law, MultivariateNormal>) {
          return log_density(law, x);
        } else {
          if (x.size() != 1) throw DomainError("scalar law evaluated at a vector point");
          return log_density(law, x[0]);
        }
      },
      d);
}

Eigen::Index dimension(const Distribution& d) {
  if (const auto* mvn = std::get_if<MultivariateNormal>(&d)) return mvn->dim();
  return 1;
}

double log_sum_exp(const double* values, std::size_t n) {
  double peak = kNegInf;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, values[i]);
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::exp(values[i] - peak);
  return peak + std::log(acc);
}

}  // namespace umcmc
