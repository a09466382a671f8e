#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace umcmc {

/// P(tau > n) for n = 0..n_max, estimated by counting.
std::vector<double> empirical_survival(std::span<const std::size_t> taus, std::size_t n_max);

/// Smallest n with #{tau_i <= n} >= q R (empirical quantile, lower order statistic).
std::size_t empirical_quantile(std::span<const std::size_t> taus, double q);

struct TailFit {
  /// survival[n] = P(tau > n).
  std::vector<double> survival;
  double fit_C = 0.0;
  double fit_kappa = 0.0;
  /// Regression window [n_min, n_end]; the bound holds for every n >= n_min.
  std::size_t n_min = 0;
  std::size_t n_end = 0;
  std::size_t points = 0;
  /// Kappa fitted on the two halves of the window.
  double kappa_first_half = 0.0;
  double kappa_second_half = 0.0;
  /// Local slope steepens markedly across the window (geometric-like decay).
  bool super_polynomial = false;

  double bound(std::size_t n) const;
};

/// Least-squares line through (log n, log P(tau > n)) on [n_min, n_end],
/// with C then inflated so that C n^{-kappa} bounds every positive survival
/// value at n >= n_min. `n_end` defaults to the last index.
TailFit fit_polynomial_bound(std::span<const double> survival, std::size_t n_min,
                             std::optional<std::size_t> n_end = std::nullopt);

/// Default fit window for a sample of meeting times: from the median to the
/// 99.9% quantile.
struct FitWindow {
  std::size_t n_min;
  std::size_t n_end;
};
FitWindow default_fit_window(std::span<const std::size_t> taus);

/// survival + fit for a sample of meeting times; survival runs to max(tau).
TailFit fit_meeting_times(std::span<const std::size_t> taus, std::optional<std::size_t> n_min = std::nullopt);

/// Columns n, p, fit; fit is blank before n_min.
void write_survival_csv(const std::filesystem::path& path, const TailFit& fit);

struct ArFit {
  std::size_t order = 0;
  std::vector<double> coefficients;
  double innovation_variance = 0.0;
};

/// Yule-Walker autoregression with AIC order selection over 0..order_max
/// (default min(n - 1, 10 log10 n)).
ArFit fit_ar_yule_walker(std::span<const double> values, std::optional<std::size_t> order_max = std::nullopt);

/// Spectral density at frequency zero of an AR fit:
/// innovation variance / (1 - sum of coefficients)^2.
double spectrum_variance(std::span<const double> values);

enum class CostUnit { kernel_calls, seconds };

struct VarianceReport {
  double v_as = 0.0;
  std::size_t n_mcmc = 0;
  std::size_t n_burnin = 0;
  /// Total serial cost in `unit` (iterations when unit == kernel_calls).
  double serial_cost = 0.0;
  double inefficiency_serial = 0.0;
  double unbiased_variance = 0.0;
  double unbiased_mean_cost = 0.0;
  double inefficiency_unbiased = 0.0;
  /// inefficiency_unbiased / inefficiency_serial.
  double ratio = 0.0;
  CostUnit unit = CostUnit::kernel_calls;
};

/// Inefficiency of unbiased estimators: mean cost x variance.
double unbiased_inefficiency(double mean_cost, double variance);

/// Compare a serial chain (full trace including burn-in) against independent
/// unbiased estimates with their costs. With `unit == seconds`, pass the
/// serial wall-clock total as `serial_cost` and per-estimate seconds in
/// `estimate_costs`; otherwise serial cost is the number of iterations.
VarianceReport inefficiency_report(std::span<const double> serial_trace, std::size_t n_burnin,
                                   std::span<const double> estimates, std::span<const double> estimate_costs,
                                   CostUnit unit = CostUnit::kernel_calls,
                                   std::optional<double> serial_cost = std::nullopt);

std::string to_string(CostUnit unit);

/// Columns param, value.
void write_report_csv(const std::filesystem::path& path, const VarianceReport& report);

}  // namespace umcmc
