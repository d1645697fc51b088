#include "mcfa/pipeline.hpp"

#include <chrono>
#include <limits>
#include <string>

#include "mcfa/errors.hpp"

namespace mcfa {

ModelOutcome fit_and_evaluate(const ObservationSet& train, const ObservationSet& test,
                              ModelKind kind, const SolverConfig& solver,
                              const CrossValidationOptions& cv,
                              std::optional<double> lambda,
                              const ParameterTensor* truth) {
  const auto start = std::chrono::steady_clock::now();
  ModelOutcome out;
  out.lambda = lambda ? *lambda : cross_validate(train, kind, solver, cv).best_lambda;
  SolverConfig cfg = solver;
  cfg.lambda = out.lambda;
  const auto fit = fit_model(train, kind, cfg, {}, cv.threads);
  for (const auto& r : fit.reports) out.converged = out.converged && r.converged;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.report = evaluate(fit.model, test, truth);
  out.report.metadata["n_train"] = train.size();
  out.report.metadata["wall_time"] = out.seconds;
  out.report.metadata["converged"] = out.converged;
  return out;
}

TrialResult run_synthetic_trial(const TrialConfig& config) {
  config.spec.validate();
  const auto truth = generate_truth(config.spec);
  const LinkModel link(config.spec.classes);
  const auto dist =
      config.row_column_sampling
          ? SamplingDistribution::row_column(config.spec.m1, config.spec.m2,
                                             config.spec.seed ^ 0x5a5a5a5aULL)
          : SamplingDistribution::uniform(config.spec.m1, config.spec.m2);
  const auto train = sample_observations(truth, dist, link, config.n, config.spec.seed + 1);
  const auto test = sample_observations(truth, dist, link, config.n_test, config.spec.seed + 2);

  auto cv = config.cv;
  cv.seed = config.spec.seed + 3;
  TrialResult res;
  res.logistic = fit_and_evaluate(train, test, ModelKind::logistic, config.solver, cv,
                                  config.lambda_logistic, &truth);
  if (config.with_gaussian)
    res.gaussian = fit_and_evaluate(train, test, ModelKind::gaussian, config.solver, cv,
                                    config.lambda_gaussian, &truth);
  for (auto* o : {&res.logistic, res.gaussian ? &*res.gaussian : nullptr}) {
    if (!o) continue;
    o->report.metadata["seed"] = config.spec.seed;
    o->report.metadata["gamma_scale"] = config.spec.gamma_scale;
  }
  return res;
}

namespace {

double number_or_nan(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

nlohmann::json to_json(const ModelOutcome& o) {
  return {{"report", to_json(o.report)},
          {"lambda", o.lambda},
          {"seconds", o.seconds},
          {"converged", o.converged}};
}

ModelOutcome model_outcome_from_json(const nlohmann::json& j) {
  ModelOutcome o;
  try {
    const auto& r = j.at("report");
    o.report.kl = number_or_nan(r.at("kl"));
    o.report.kl_per_class = number_or_nan(r.at("kl_per_class"));
    o.report.hellinger_sq = number_or_nan(r.at("hellinger_sq"));
    o.report.frobenius_sq_normalized = number_or_nan(r.at("frobenius_sq_normalized"));
    o.report.prediction_error = r.at("prediction_error").get<double>();
    o.report.confusion = r.at("confusion").get<std::vector<std::vector<std::size_t>>>();
    o.report.metadata = r.at("metadata");
    o.lambda = j.at("lambda").get<double>();
    o.seconds = j.at("seconds").get<double>();
    o.converged = j.at("converged").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model outcome: ") + e.what());
  }
  return o;
}

nlohmann::json to_json(const TrialResult& r) {
  nlohmann::json j{{"logistic", to_json(r.logistic)}};
  j["gaussian"] = r.gaussian ? to_json(*r.gaussian) : nlohmann::json(nullptr);
  return j;
}

TrialResult trial_result_from_json(const nlohmann::json& j) {
  TrialResult r;
  if (!j.contains("logistic")) throw DataError("trial result: missing logistic outcome");
  r.logistic = model_outcome_from_json(j["logistic"]);
  if (j.contains("gaussian") && !j["gaussian"].is_null())
    r.gaussian = model_outcome_from_json(j["gaussian"]);
  return r;
}

RatingsOutcome run_ratings_experiment(const ObservationSet& ratings, double test_frac,
                                      const SolverConfig& solver,
                                      const CrossValidationOptions& cv,
                                      std::uint64_t seed) {
  const auto parts = split(ratings, test_frac, 0.0, seed);
  RatingsOutcome out;
  auto both = [&](const ObservationSet& train, const ObservationSet& test) {
    return std::pair{fit_and_evaluate(train, test, ModelKind::logistic, solver, cv),
                     fit_and_evaluate(train, test, ModelKind::gaussian, solver, cv)};
  };
  for (int r = 1; r <= ratings.classes(); ++r)
    out.one_vs_rest.push_back(both(binarize_one_vs_rest(parts.train, r),
                                   binarize_one_vs_rest(parts.test, r)));
  out.multinomial = both(parts.train, parts.test);
  return out;
}

}  // namespace mcfa
