#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcfa/link.hpp"
#include "mcfa/model.hpp"
#include "mcfa/tensor_model.hpp"

namespace mcfa {

/// Fraction of observations whose argmax class differs from the label.
/// `probabilities` is row-major n x K; argmax ties go to the smaller class.
double prediction_error(std::span<const double> probabilities, int classes,
                        std::span<const std::uint32_t> labels);

/// argmax_j p_j with ties broken toward the smaller class (1-based).
int predicted_class(std::span<const double> p);

/// sum_l |X^l - X2^l|_F^2 / (m1 m2).
double frobenius_error(const ParameterTensor& estimate, const ParameterTensor& truth);

struct EvalReport {
  /// KL(truth || estimate) averaged over cells; NaN without a truth.
  double kl = std::numeric_limits<double>::quiet_NaN();
  /// kl / K.
  double kl_per_class = std::numeric_limits<double>::quiet_NaN();
  double hellinger_sq = std::numeric_limits<double>::quiet_NaN();
  /// Only defined when the estimate lives in the truth's parameter space.
  double frobenius_sq_normalized = std::numeric_limits<double>::quiet_NaN();
  double prediction_error = 0.0;
  /// confusion[true - 1][predicted - 1]
  std::vector<std::vector<std::size_t>> confusion;
  nlohmann::json metadata = nlohmann::json::object();
};

/// Fingerprint of a labelled set, stored in report metadata so that two
/// reports can be checked for a shared test set.
std::string fingerprint(const ObservationSet& obs);

/// Evaluates a fitted model on a test set, and against the generating tensor
/// when `truth` is given (logit link assumed for the truth).
EvalReport evaluate(const FittedModel& model, const ObservationSet& test,
                    const ParameterTensor* truth = nullptr);

nlohmann::json to_json(const EvalReport& r);

struct ComparisonRow {
  std::string metric;
  double logistic = 0.0;
  double gaussian = 0.0;
  double difference = 0.0;  // logistic - gaussian
};

/// Paired metrics; throws DomainError when the reports were computed on
/// different test sets.
std::vector<ComparisonRow> compare_models(const EvalReport& logistic,
                                          const EvalReport& gaussian);

/// RFC 4180 CSV.
void write_csv_row(std::ostream& out, std::span<const std::string> fields);
std::vector<std::string> parse_csv_row(const std::string& line);
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

std::string format_double(double v);

}  // namespace mcfa
