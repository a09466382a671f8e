#include "umcmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <stdexcept>

#include <Eigen/Core>

namespace umcmc {

std::vector<double> empirical_survival(std::span<const std::size_t> taus, std::size_t n_max) {
  if (taus.empty()) throw std::invalid_argument("empirical_survival: no meeting times");
  std::vector<std::size_t> counts(n_max + 2, 0);
  for (std::size_t tau : taus) {
    if (tau < 1) throw std::invalid_argument("empirical_survival: meeting times must be >= 1");
    ++counts[std::min(tau, n_max + 1)];
  }
  // exceed[n] = #{tau > n}, built from the top down.
  std::vector<double> survival(n_max + 1);
  std::size_t exceed = counts[n_max + 1];
  const double r = static_cast<double>(taus.size());
  for (std::size_t n = n_max + 1; n-- > 0;) {
    survival[n] = static_cast<double>(exceed) / r;
    exceed += counts[n];
  }
  return survival;
}

std::size_t empirical_quantile(std::span<const std::size_t> taus, double q) {
  if (taus.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("empirical_quantile: q must lie in (0, 1]");
  std::vector<std::size_t> sorted(taus.begin(), taus.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::max<std::size_t>(rank, 1) - 1];
}

double TailFit::bound(std::size_t n) const {
  if (n == 0) return fit_C;
  return fit_C * std::pow(static_cast<double>(n), -fit_kappa);
}

namespace {

struct LineFit {
  double slope;
  double intercept;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {slope, my - slope * mx};
}

}  // namespace

TailFit fit_polynomial_bound(std::span<const double> survival, std::size_t n_min, std::optional<std::size_t> n_end) {
  if (survival.empty()) throw std::invalid_argument("fit_polynomial_bound: empty survival sequence");
  const std::size_t last = survival.size() - 1;
  const std::size_t end = std::min(n_end.value_or(last), last);
  n_min = std::max<std::size_t>(n_min, 1);

  std::vector<double> lx, ly;
  for (std::size_t n = n_min; n <= end; ++n) {
    if (survival[n] > 0.0) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(survival[n]));
    }
  }
  if (lx.size() < 5) {
    throw std::invalid_argument("fit_polynomial_bound: fewer than five positive survival values in the window");
  }

  TailFit fit;
  fit.survival.assign(survival.begin(), survival.end());
  fit.n_min = n_min;
  fit.n_end = end;
  fit.points = lx.size();
  fit.fit_kappa = -least_squares(lx, ly).slope;

  const std::size_t half = lx.size() / 2;
  const std::vector<double> x1(lx.begin(), lx.begin() + static_cast<std::ptrdiff_t>(half + 1));
  const std::vector<double> y1(ly.begin(), ly.begin() + static_cast<std::ptrdiff_t>(half + 1));
  const std::vector<double> x2(lx.begin() + static_cast<std::ptrdiff_t>(half), lx.end());
  const std::vector<double> y2(ly.begin() + static_cast<std::ptrdiff_t>(half), ly.end());
  fit.kappa_first_half = -least_squares(x1, y1).slope;
  fit.kappa_second_half = -least_squares(x2, y2).slope;
  fit.super_polynomial = fit.kappa_first_half > 0.0 && fit.kappa_second_half > 1.5 * fit.kappa_first_half;

  // Inflate C so the bound covers the whole tail from n_min on.
  double log_c = -std::numeric_limits<double>::infinity();
  for (std::size_t n = n_min; n <= last; ++n) {
    if (survival[n] > 0.0) {
      log_c = std::max(log_c, std::log(survival[n]) + fit.fit_kappa * std::log(static_cast<double>(n)));
    }
  }
  fit.fit_C = std::exp(log_c);
  // Guard against rounding in exp/log so the bound property holds exactly.
  for (std::size_t n = n_min; n <= last; ++n) {
    while (fit.bound(n) < survival[n]) fit.fit_C = std::nextafter(fit.fit_C, std::numeric_limits<double>::infinity());
  }
  return fit;
}

FitWindow default_fit_window(std::span<const std::size_t> taus) {
  return {empirical_quantile(taus, 0.5), empirical_quantile(taus, 0.999)};
}

TailFit fit_meeting_times(std::span<const std::size_t> taus, std::optional<std::size_t> n_min) {
  const std::size_t max_tau = *std::max_element(taus.begin(), taus.end());
  const auto survival = empirical_survival(taus, max_tau);
  FitWindow window = default_fit_window(taus);
  if (n_min) window.n_min = *n_min;
  if (window.n_end <= window.n_min) window.n_end = max_tau;
  return fit_polynomial_bound(survival, window.n_min, window.n_end);
}

void write_survival_csv(const std::filesystem::path& path, const TailFit& fit) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "n,p,fit\n" << std::setprecision(17);
  for (std::size_t n = 0; n < fit.survival.size(); ++n) {
    out << n << ',' << fit.survival[n] << ',';
    if (n >= fit.n_min) out << fit.bound(n);
    out << '\n';
  }
}

ArFit fit_ar_yule_walker(std::span<const double> values, std::optional<std::size_t> order_max) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("fit_ar_yule_walker: need at least two values");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit_ar_yule_walker: non-finite value in trace");
  }
  const double nd = static_cast<double>(n);
  const std::size_t pmax = std::min(
      order_max.value_or(static_cast<std::size_t>(std::floor(10.0 * std::log10(nd)))), n - 1);

  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / nd;
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = values[i] - mean;
  std::vector<double> acov(pmax + 1, 0.0);
  for (std::size_t lag = 0; lag <= pmax; ++lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += centered[i] * centered[i + lag];
    acov[lag] = acc / nd;
  }

  ArFit out;
  if (acov[0] <= 0.0) return out;  // constant trace

  // Levinson-Durbin: phi[p] holds the order-p coefficients, var[p] the
  // innovation variance.
  std::vector<std::vector<double>> phi(pmax + 1);
  std::vector<double> var(pmax + 1);
  var[0] = acov[0];
  for (std::size_t p = 1; p <= pmax; ++p) {
    double num = acov[p];
    for (std::size_t j = 1; j < p; ++j) num -= phi[p - 1][j - 1] * acov[p - j];
    const double reflection = num / var[p - 1];
    phi[p].resize(p);
    for (std::size_t j = 1; j < p; ++j) phi[p][j - 1] = phi[p - 1][j - 1] - reflection * phi[p - 1][p - j - 1];
    phi[p][p - 1] = reflection;
    var[p] = var[p - 1] * (1.0 - reflection * reflection);
    if (!(var[p] > 0.0)) {
      var.resize(p);
      phi.resize(p);
      break;
    }
  }

  // AIC up to additive constants, first minimum wins.
  std::size_t best = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < var.size(); ++p) {
    const double aic = nd * std::log(var[p]) + 2.0 * static_cast<double>(p);
    if (aic < best_aic) {
      best_aic = aic;
      best = p;
    }
  }
  out.order = best;
  out.coefficients = best == 0 ? std::vector<double>{} : phi[best];
  out.innovation_variance = var[best] * nd / (nd - static_cast<double>(best + 1));
  return out;
}

double spectrum_variance(std::span<const double> values) {
  if (values.size() < 100) throw std::invalid_argument("spectrum_variance: requires at least 100 values");
  const ArFit fit = fit_ar_yule_walker(values);
  if (fit.innovation_variance == 0.0) return 0.0;
  const double sum = std::accumulate(fit.coefficients.begin(), fit.coefficients.end(), 0.0);
  return fit.innovation_variance / ((1.0 - sum) * (1.0 - sum));
}

double unbiased_inefficiency(double mean_cost, double variance) { return mean_cost * variance; }

VarianceReport inefficiency_report(std::span<const double> serial_trace, std::size_t n_burnin,
                                   std::span<const double> estimates, std::span<const double> estimate_costs,
                                   CostUnit unit, std::optional<double> serial_cost) {
  if (serial_trace.empty() || estimates.empty()) throw std::invalid_argument("inefficiency_report: empty input");
  if (n_burnin >= serial_trace.size()) throw std::invalid_argument("inefficiency_report: burn-in covers the trace");
  if (estimates.size() != estimate_costs.size()) {
    throw std::invalid_argument("inefficiency_report: estimates and costs differ in length");
  }
  VarianceReport report;
  report.unit = unit;
  report.n_mcmc = serial_trace.size();
  report.n_burnin = n_burnin;
  report.v_as = spectrum_variance(serial_trace.subspan(n_burnin));
  report.serial_cost = serial_cost.value_or(static_cast<double>(report.n_mcmc));
  report.inefficiency_serial =
      report.serial_cost * report.v_as / static_cast<double>(report.n_mcmc - report.n_burnin);

  const double r = static_cast<double>(estimates.size());
  const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / r;
  double ss = 0.0;
  for (double e : estimates) ss += (e - mean) * (e - mean);
  report.unbiased_variance = estimates.size() > 1 ? ss / (r - 1.0) : 0.0;
  report.unbiased_mean_cost = std::accumulate(estimate_costs.begin(), estimate_costs.end(), 0.0) / r;
  report.inefficiency_unbiased = unbiased_inefficiency(report.unbiased_mean_cost, report.unbiased_variance);
  report.ratio = report.inefficiency_serial > 0.0 ? report.inefficiency_unbiased / report.inefficiency_serial
                                                  : std::numeric_limits<double>::infinity();
  return report;
}

void write_report_csv(const std::filesystem::path& path, const VarianceReport& r) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "param,value\n" << std::setprecision(17);
  out << "v_as," << r.v_as << "\n";
  out << "n_mcmc," << r.n_mcmc << "\n";
  out << "n_burnin," << r.n_burnin << "\n";
  out << "serial_cost," << r.serial_cost << "\n";
  out << "inefficiency_serial," << r.inefficiency_serial << "\n";
  out << "unbiased_variance," << r.unbiased_variance << "\n";
  out << "unbiased_mean_cost," << r.unbiased_mean_cost << "\n";
  out << "inefficiency_unbiased," << r.inefficiency_unbiased << "\n";
  out << "ratio," << r.ratio << "\n";
  out << "cost_unit," << to_string(r.unit) << "\n";
}

std::string to_string(CostUnit unit) { return unit == CostUnit::seconds ? "seconds" : "kernel_calls"; }

}  // namespace umcmc
