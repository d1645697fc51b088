#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcfa/link.hpp"
#include "mcfa/model.hpp"
#include "mcfa/solver.hpp"
#include "mcfa/tensor_model.hpp"

namespace mcfa {

/// lambda = 6 L sqrt(2 nu log(d) / (m n)), d = m1 + m2, m = min(m1, m2).
double theoretical_lambda(double L, double nu, std::size_t n, std::size_t m1,
                          std::size_t m2);
/// Same with L taken from the link constants on |x| <= gamma.
double theoretical_lambda(const LinkModel& link, double gamma, double nu,
                          std::size_t n, std::size_t m1, std::size_t m2);

/// ceil(0.6 ln n), at least 1.
std::size_t grid_size(std::size_t n);

/// Decreasing geometric sequence from `ceiling` down to ceiling * floor_ratio.
struct LambdaGrid {
  std::vector<double> values;
  double ceiling = 0.0;

  static LambdaGrid geometric(double ceiling, std::size_t size,
                              double floor_ratio = 1e-3);
  std::size_t size() const noexcept { return values.size(); }
};

/// Smallest lambda at which the estimator of `kind` is zero on `obs`.
double null_lambda(const ObservationSet& obs, ModelKind kind);

/// Fits one model at config.lambda. `warm` is either empty or holds one
/// decomposition per slice of the model.
struct ModelFit {
  FittedModel model;
  std::vector<FitReport> reports;  // one per slice
};
ModelFit fit_model(const ObservationSet& obs, ModelKind kind,
                   const SolverConfig& config,
                   std::span<const AtomicDecomposition> warm = {},
                   int threads = 1);

/// Held-out score used for selection: mean negative log-likelihood per draw
/// for the logistic model, mean squared error for the Gaussian one.
double validation_score(const FittedModel& model, const ObservationSet& held_out);

struct CrossValidationOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  /// Stop descending the grid after this many consecutive grid points whose
  /// mean score is worse than the best so far; 0 evaluates the whole grid.
  int patience = 0;
  int threads = 1;
  /// Overrides grid_size(n).
  std::optional<std::size_t> grid_points;
  double floor_ratio = 1e-3;
};

struct CrossValidationResult {
  LambdaGrid grid;
  /// Mean score per grid point; NaN where the descent stopped early.
  std::vector<double> scores;
  /// fold_scores[f][i], NaN where not evaluated.
  std::vector<std::vector<double>> fold_scores;
  std::size_t best_index = 0;
  double best_lambda = 0.0;
};

/// K-fold cross-validation over the geometric grid. The ceiling is the
/// largest null lambda over the full set and every training fold, so the
/// first grid point gives the zero estimate everywhere. Each fold walks the
/// grid downward with warm starts; ties go to the larger lambda.
CrossValidationResult cross_validate(const ObservationSet& obs, ModelKind kind,
                                     const SolverConfig& config,
                                     const CrossValidationOptions& options = {});

}  // namespace mcfa
