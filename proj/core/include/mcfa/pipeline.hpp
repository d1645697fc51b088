#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mcfa/data.hpp"
#include "mcfa/evaluation.hpp"
#include "mcfa/model.hpp"
#include "mcfa/solver.hpp"
#include "mcfa/tuning.hpp"

namespace mcfa {

/// One synthetic replicate: draw a truth, a training sample of size n and an
/// independent test sample, select lambda by cross-validation for each model
/// (unless fixed), refit on the whole training sample and evaluate.
struct TrialConfig {
  SyntheticSpec spec;
  std::size_t n = 10000;
  std::size_t n_test = 100000;
  bool row_column_sampling = false;
  SolverConfig solver;
  CrossValidationOptions cv;
  std::optional<double> lambda_logistic;
  std::optional<double> lambda_gaussian;
  bool with_gaussian = true;
};

struct ModelOutcome {
  EvalReport report;
  double lambda = 0.0;
  double seconds = 0.0;
  bool converged = true;
};

struct TrialResult {
  ModelOutcome logistic;
  std::optional<ModelOutcome> gaussian;
};

TrialResult run_synthetic_trial(const TrialConfig& config);

nlohmann::json to_json(const ModelOutcome& o);
ModelOutcome model_outcome_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrialResult& r);
TrialResult trial_result_from_json(const nlohmann::json& j);

/// Cross-validates (or uses `lambda`), refits on `train` and evaluates on
/// `test`.
ModelOutcome fit_and_evaluate(const ObservationSet& train, const ObservationSet& test,
                              ModelKind kind, const SolverConfig& solver,
                              const CrossValidationOptions& cv,
                              std::optional<double> lambda = std::nullopt,
                              const ParameterTensor* truth = nullptr);

/// Real-data protocol: a random test_frac of the ratings is held out, lambda
/// is cross-validated on the rest.
struct RatingsOutcome {
  /// one_vs_rest[r - 1] for target rating r: (logistic, gaussian).
  std::vector<std::pair<ModelOutcome, ModelOutcome>> one_vs_rest;
  std::pair<ModelOutcome, ModelOutcome> multinomial;
};

RatingsOutcome run_ratings_experiment(const ObservationSet& ratings,
                                      double test_frac, const SolverConfig& solver,
                                      const CrossValidationOptions& cv,
                                      std::uint64_t seed);

}  // namespace mcfa
