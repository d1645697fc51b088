#pragma once

#include <span>
#include <vector>

#include "mcfa/solver.hpp"
#include "mcfa/tensor_model.hpp"

namespace mcfa {

/// Squared-loss matrix completion estimate with a residual scale.
struct GaussianFit {
  AtomicDecomposition estimate;
  double sigma_hat = 1.0;
  FitReport report;
};

/// Smallest residual scale handed out by fit_gaussian.
inline constexpr double kSigmaFloor = 1e-6;

/// Minimizes (1/n) sum_i (Y_i - X_i)^2 + lambda |X|_{sigma,1} with the
/// lifted solver, labels read as the reals 1..K. sigma_hat is the sample
/// standard deviation of the training residuals, floored at kSigmaFloor.
GaussianFit fit_gaussian(const ObservationSet& obs, const SolverConfig& config,
                         const AtomicDecomposition* warm_start = nullptr);

/// P(Y = j) = F((j + 0.5 - x)/s) - F((j - 0.5 - x)/s) with the first and last
/// bins extended to -inf and +inf. F is the standard normal cdf.
void gaussian_class_probs(double x_hat, double sigma_hat, int classes,
                          std::span<double> out);
std::vector<double> gaussian_class_probs(double x_hat, double sigma_hat,
                                         int classes);
/// Same, reading the estimate at `entry` from a fit.
std::vector<double> gaussian_class_probs(const GaussianFit& fit,
                                         EntryIndex entry, int classes);

/// log P(Y = j), finite for any finite x_hat even where P underflows.
void gaussian_class_log_probs(double x_hat, double sigma_hat, int classes,
                              std::span<double> out);

/// Standard normal cdf.
double normal_cdf(double z);
/// log of the standard normal cdf, accurate deep into the lower tail.
double log_normal_cdf(double z);

}  // namespace mcfa
