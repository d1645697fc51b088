#include "mcfa/evaluation.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mcfa/errors.hpp"

namespace mcfa {

int predicted_class(std::span<const double> p) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < p.size(); ++j)
    if (p[j] > p[best]) best = j;
  return static_cast<int>(best) + 1;
}

double prediction_error(std::span<const double> probabilities, int classes,
                        std::span<const std::uint32_t> labels) {
  if (labels.empty()) throw DomainError("prediction_error: empty test set");
  const auto k = static_cast<std::size_t>(classes);
  if (probabilities.size() != labels.size() * k)
    throw StructuralError("prediction_error: expected K probabilities per label");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (predicted_class(probabilities.subspan(i * k, k)) != static_cast<int>(labels[i]))
      ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

double frobenius_error(const ParameterTensor& estimate, const ParameterTensor& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols() ||
      estimate.slice_count() != truth.slice_count())
    throw StructuralError("frobenius_error: tensor shapes differ");
  double s = 0.0;
  for (int l = 0; l < truth.slice_count(); ++l)
    s += (estimate.slice(l) - truth.slice(l)).squaredNorm();
  return s / (static_cast<double>(truth.rows()) * static_cast<double>(truth.cols()));
}

std::string fingerprint(const ObservationSet& obs) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint32_t v) {
    for (int b = 0; b < 4; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& r : obs.records()) {
    mix(r.row);
    mix(r.col);
    mix(r.label);
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%zu:%016llx", obs.size(),
                static_cast<unsigned long long>(h));
  return buf;
}

EvalReport evaluate(const FittedModel& model, const ObservationSet& test,
                    const ParameterTensor* truth) {
  if (test.empty()) throw DomainError("evaluate: empty test set");
  if (test.classes() != model.classes || test.rows() != model.rows ||
      test.cols() != model.cols)
    throw StructuralError("evaluate: test set does not match the model shape");
  const auto k = static_cast<std::size_t>(model.classes);
  EvalReport r;
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));

  const auto probs = model.probabilities(test.entries());
  std::size_t wrong = 0;
  for (std::size_t e = 0; e < test.entry_count(); ++e) {
    const int pred = predicted_class({probs.data() + e * k, k});
    const auto c = test.counts(e);
    for (std::size_t j = 0; j < k; ++j) {
      r.confusion[j][static_cast<std::size_t>(pred - 1)] += c[j];
      if (static_cast<int>(j) + 1 != pred) wrong += c[j];
    }
  }
  r.prediction_error = static_cast<double>(wrong) / static_cast<double>(test.size());

  if (truth) {
    if (truth->rows() != model.rows || truth->cols() != model.cols ||
        truth->classes() != model.classes)
      throw StructuralError("evaluate: truth does not match the model shape");
    const LinkModel link(model.classes);
    // KL from log q: far-tail Gaussian masses underflow in q itself.
    const auto est_log = model.dense_log_probabilities();
    std::vector<double> x(k - 1), p(k), q(k);
    double kl = 0.0, hel = 0.0;
    for (std::size_t row = 0; row < model.rows; ++row) {
      for (std::size_t col = 0; col < model.cols; ++col) {
        truth->entry(row, col, x);
        link.class_probabilities(x, p);
        const std::span<const double> log_q(est_log.data() + (row * model.cols + col) * k, k);
        for (std::size_t j = 0; j < k; ++j) q[j] = std::exp(log_q[j]);
        kl += kl_terms_log(p, log_q);
        hel += hellinger_terms(p, q);
      }
    }
    const double cells = static_cast<double>(model.rows) * static_cast<double>(model.cols);
    r.kl = kl / cells;
    r.kl_per_class = r.kl / static_cast<double>(k);
    r.hellinger_sq = hel / cells;
    if (model.kind == ModelKind::logistic)
      r.frobenius_sq_normalized = frobenius_error(to_tensor(model.slices), *truth);
  }

  r.metadata = {{"model", to_string(model.kind)},
                {"lambda", model.lambda},
                {"classes", model.classes},
                {"rows", model.rows},
                {"cols", model.cols},
                {"n_test", test.size()},
                {"test_fingerprint", fingerprint(test)}};
  return r;
}

namespace {

// JSON has no infinities: a divergence of +inf is written as "inf", and a
// metric that was not computed as null.
nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  if (v > 0) return "inf";
  return nullptr;
}

}  // namespace

nlohmann::json to_json(const EvalReport& r) {
  return {{"kl", number_or_null(r.kl)},
          {"kl_per_class", number_or_null(r.kl_per_class)},
          {"hellinger_sq", number_or_null(r.hellinger_sq)},
          {"frobenius_sq_normalized", number_or_null(r.frobenius_sq_normalized)},
          {"prediction_error", r.prediction_error},
          {"confusion", r.confusion},
          {"metadata", r.metadata}};
}

std::vector<ComparisonRow> compare_models(const EvalReport& logistic,
                                          const EvalReport& gaussian) {
  if (logistic.metadata.value("test_fingerprint", std::string()) !=
      gaussian.metadata.value("test_fingerprint", std::string()))
    throw DomainError("compare_models: reports use different test sets");
  std::vector<ComparisonRow> rows;
  auto add = [&](const char* name, double a, double b) {
    rows.push_back({name, a, b, a - b});
  };
  add("prediction_error", logistic.prediction_error, gaussian.prediction_error);
  add("kl", logistic.kl, gaussian.kl);
  add("kl_per_class", logistic.kl_per_class, gaussian.kl_per_class);
  add("hellinger_sq", logistic.hellinger_sq, gaussian.hellinger_sq);
  return rows;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    const auto& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out << f;
      continue;
    }
    out << '"';
    for (char c : f) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  }
  out << "\r\n";
}

std::vector<std::string> parse_csv_row(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r' && c != '\n') {
      fields.back() += c;
    }
  }
  return fields;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  const std::string header[] = {"metric", "logistic", "gaussian", "difference"};
  write_csv_row(out, header);
  for (const auto& r : rows) {
    const std::string f[] = {r.metric, format_double(r.logistic),
                             format_double(r.gaussian), format_double(r.difference)};
    write_csv_row(out, f);
  }
}

}  // namespace mcfa
