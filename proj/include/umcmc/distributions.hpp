#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "umcmc/rng.hpp"

namespace umcmc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when a law is constructed with parameters outside its domain.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

struct Normal {
  double mean;
  double sd;
  Normal(double mean, double sd);
};

struct Uniform {
  double lo;
  double hi;
  Uniform(double lo, double hi);
};

struct Beta {
  double a;
  double b;
  Beta(double a, double b);
};

/// Gamma with shape/rate parameterisation (mean shape/rate).
struct Gamma {
  double shape;
  double rate;
  Gamma(double shape, double rate);
};

/// Density x -> b^a / Gamma(a) x^{-a-1} exp(-b/x).
struct InverseGamma {
  double shape;
  double scale;
  InverseGamma(double shape, double scale);
};

struct LogNormal {
  double mu;
  double sigma;
  LogNormal(double mu, double sigma);
};

struct Binomial {
  std::int64_t n;
  double p;
  Binomial(std::int64_t n, double p);
};

/// Gaussian with full covariance; the Cholesky factor is computed once.
class MultivariateNormal {
 public:
  MultivariateNormal(Vector mean, Matrix covariance);
  static MultivariateNormal diagonal(Vector mean, const Vector& variances);

  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return covariance_; }
  const Matrix& cholesky() const { return chol_; }
  double log_det() const { return log_det_; }
  Eigen::Index dim() const { return mean_.size(); }

 private:
  Vector mean_;
  Matrix covariance_;
  Matrix chol_;
  double log_det_ = 0.0;
};

using Distribution =
    std::variant<Normal, MultivariateNormal, Uniform, Beta, Binomial, Gamma, InverseGamma, LogNormal>;

double sample(const Normal& d, RngStream& s);
double sample(const Uniform& d, RngStream& s);
double sample(const Beta& d, RngStream& s);
double sample(const Gamma& d, RngStream& s);
double sample(const InverseGamma& d, RngStream& s);
double sample(const LogNormal& d, RngStream& s);
double sample(const Binomial& d, RngStream& s);
Vector sample(const MultivariateNormal& d, RngStream& s);

double log_density(const Normal& d, double x);
double log_density(const Uniform& d, double x);
double log_density(const Beta& d, double x);
double log_density(const Gamma& d, double x);
double log_density(const InverseGamma& d, double x);
double log_density(const LogNormal& d, double x);
double log_density(const Binomial& d, double x);
double log_density(const MultivariateNormal& d, const Vector& x);

/// Variant-level access; scalar laws are treated as one-dimensional vectors.
Vector sample(const Distribution& d, RngStream& s);
double log_density(const Distribution& d, const Vector& x);
Eigen::Index dimension(const Distribution& d);

/// Gamma(shape, 1) draw via Marsaglia-Tsang.
double standard_gamma(double shape, RngStream& s);

double log_sum_exp(const double* values, std::size_t n);

}  // namespace umcmc
