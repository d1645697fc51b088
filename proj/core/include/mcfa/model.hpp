#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcfa/tensor_model.hpp"

namespace mcfa {

enum class ModelKind { logistic, gaussian };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

/// A fitted estimator: one decomposition per slice for the logistic model,
/// a single decomposition plus residual scale for the Gaussian one.
struct FittedModel {
  ModelKind kind = ModelKind::logistic;
  int classes = 2;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double lambda = 0.0;
  double sigma_hat = 1.0;  // Gaussian only
  std::vector<AtomicDecomposition> slices;

  /// Class probabilities at each entry, row-major n x K.
  std::vector<double> probabilities(std::span<const EntryIndex> entries) const;
  /// Same over every cell (row-major cells, then classes).
  std::vector<double> dense_probabilities() const;
  /// log of probabilities(), without underflow to -inf.
  std::vector<double> log_probabilities(std::span<const EntryIndex> entries) const;
  std::vector<double> dense_log_probabilities() const;
};

nlohmann::json to_json(const FittedModel& m);
FittedModel fitted_model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const FittedModel& m);
FittedModel load_model(const std::filesystem::path& path);

}  // namespace mcfa
