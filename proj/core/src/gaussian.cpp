#include "mcfa/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mcfa/errors.hpp"
#include "mcfa/loss.hpp"

namespace mcfa {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double log_normal_cdf(double z) {
  if (z > -30.0) return std::log(normal_cdf(z));
  // Mills ratio series; the first omitted term is below 1e-12 here.
  const double t = 1.0 / (z * z);
  const double series = 1.0 - t * (1.0 - 3.0 * t * (1.0 - 5.0 * t * (1.0 - 7.0 * t)));
  return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log(series);
}

GaussianFit fit_gaussian(const ObservationSet& obs, const SolverConfig& config,
                         const AtomicDecomposition* warm_start) {
  if (obs.empty()) throw DomainError("fit_gaussian: no observations");
  const auto problem = SliceProblem::squared(obs);
  GaussianFit fit;
  fit.report = solve_slice(problem, config, warm_start);
  fit.estimate = fit.report.decomposition;

  // Residuals over every draw, duplicates included.
  const auto values = entry_values(fit.estimate, obs.entries());
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t e = 0; e < obs.entry_count(); ++e) {
    const auto c = obs.counts(e);
    for (int j = 1; j <= obs.classes(); ++j) {
      const double cnt = c[static_cast<std::size_t>(j - 1)];
      const double r = j - values[e];
      sum += cnt * r;
      sum_sq += cnt * r * r;
    }
  }
  const double n = static_cast<double>(obs.size());
  double var = 0.0;
  if (n > 1) var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1));
  fit.sigma_hat = std::max(std::sqrt(var), kSigmaFloor);
  return fit;
}

void gaussian_class_probs(double x_hat, double sigma_hat, int classes,
                          std::span<double> out) {
  if (!(sigma_hat > 0)) throw DomainError("gaussian_class_probs: sigma_hat must be > 0");
  if (classes < 2) throw DomainError("gaussian_class_probs: need at least two classes");
  if (!std::isfinite(x_hat)) throw DomainError("gaussian_class_probs: estimate is not finite");
  if (out.size() != static_cast<std::size_t>(classes))
    throw StructuralError("gaussian_class_probs: output size mismatch");
  // Thresholds at j + 0.5 for j = 1..K-1. Each interval is measured from the
  // tail it lies in, so masses far from x_hat keep their relative precision
  // instead of cancelling to zero.
  const double inf = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= classes; ++j) {
    const double a = j == 1 ? -inf : (j - 0.5 - x_hat) / sigma_hat;
    const double b = j == classes ? inf : (j + 0.5 - x_hat) / sigma_hat;
    double mass;
    if (a >= 0)
      mass = normal_cdf(-a) - normal_cdf(-b);
    else if (b <= 0)
      mass = normal_cdf(b) - normal_cdf(a);
    else
      mass = 1.0 - normal_cdf(a) - normal_cdf(-b);
    out[static_cast<std::size_t>(j - 1)] = std::max(0.0, mass);
  }
}

void gaussian_class_log_probs(double x_hat, double sigma_hat, int classes,
                              std::span<double> out) {
  if (!(sigma_hat > 0)) throw DomainError("gaussian_class_log_probs: sigma_hat must be > 0");
  if (classes < 2) throw DomainError("gaussian_class_log_probs: need at least two classes");
  if (!std::isfinite(x_hat))
    throw DomainError("gaussian_class_log_probs: estimate is not finite");
  if (out.size() != static_cast<std::size_t>(classes))
    throw StructuralError("gaussian_class_log_probs: output size mismatch");
  const double inf = std::numeric_limits<double>::infinity();
  // log(F(hi) - F(lo)) = log F(hi) + log1p(-F(lo) / F(hi)), taken in the tail
  // that holds the interval.
  auto log_diff = [](double log_hi, double log_lo) {
    return log_hi + std::log1p(-std::exp(log_lo - log_hi));
  };
  for (int j = 1; j <= classes; ++j) {
    const double a = j == 1 ? -inf : (j - 0.5 - x_hat) / sigma_hat;
    const double b = j == classes ? inf : (j + 0.5 - x_hat) / sigma_hat;
    double v;
    if (a >= 0)
      v = log_diff(log_normal_cdf(-a), b == inf ? -inf : log_normal_cdf(-b));
    else if (b <= 0)
      v = log_diff(log_normal_cdf(b), a == -inf ? -inf : log_normal_cdf(a));
    else
      v = std::log1p(-(normal_cdf(a) + normal_cdf(-b)));
    out[static_cast<std::size_t>(j - 1)] = v;
  }
}

std::vector<double> gaussian_class_probs(double x_hat, double sigma_hat,
                                         int classes) {
  std::vector<double> p(static_cast<std::size_t>(classes));
  gaussian_class_probs(x_hat, sigma_hat, classes, p);
  return p;
}

std::vector<double> gaussian_class_probs(const GaussianFit& fit,
                                         EntryIndex entry, int classes) {
  const EntryIndex one[] = {entry};
  const double x = entry_values(fit.estimate, one).front();
  return gaussian_class_probs(x, fit.sigma_hat, classes);
}

}  // namespace mcfa
