#include "mcfa/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcfa/data.hpp"
#include "mcfa/errors.hpp"
#include "mcfa/gaussian.hpp"
#include "mcfa/loss.hpp"
#include "mcfa/parallel.hpp"

namespace mcfa {

double theoretical_lambda(double L, double nu, std::size_t n, std::size_t m1,
                          std::size_t m2) {
  if (!(L > 0) || !(nu > 0) || n == 0 || m1 == 0 || m2 == 0)
    throw DomainError("theoretical_lambda: all arguments must be positive");
  const double d = static_cast<double>(m1 + m2);
  const double m = static_cast<double>(std::min(m1, m2));
  return 6.0 * L * std::sqrt(2.0 * nu * std::log(d) / (m * static_cast<double>(n)));
}

double theoretical_lambda(const LinkModel& link, double gamma, double nu,
                          std::size_t n, std::size_t m1, std::size_t m2) {
  return theoretical_lambda(link.constants(gamma).L, nu, n, m1, m2);
}

std::size_t grid_size(std::size_t n) {
  if (n < 2) return 1;
  const auto s = static_cast<std::size_t>(std::ceil(0.6 * std::log(static_cast<double>(n))));
  return std::max<std::size_t>(s, 1);
}

LambdaGrid LambdaGrid::geometric(double ceiling, std::size_t size, double floor_ratio) {
  if (!(ceiling > 0) || !std::isfinite(ceiling))
    throw DomainError("LambdaGrid: ceiling must be positive and finite");
  if (size == 0) throw DomainError("LambdaGrid: empty grid");
  if (!(floor_ratio > 0 && floor_ratio <= 1))
    throw DomainError("LambdaGrid: floor ratio must lie in (0, 1]");
  LambdaGrid g;
  g.ceiling = ceiling;
  g.values.resize(size);
  g.values[0] = ceiling;
  if (size > 1) {
    const double ratio = std::pow(floor_ratio, 1.0 / static_cast<double>(size - 1));
    for (std::size_t i = 1; i < size; ++i) g.values[i] = ceiling * std::pow(ratio, static_cast<double>(i));
  }
  return g;
}

namespace {

std::vector<SliceProblem> problems_for(const ObservationSet& obs, ModelKind kind) {
  std::vector<SliceProblem> out;
  if (kind == ModelKind::gaussian) {
    out.push_back(SliceProblem::squared(obs));
  } else {
    const LinkModel link(obs.classes());
    for (int l = 0; l < link.slice_count(); ++l)
      out.push_back(SliceProblem::multinomial(obs, link, l));
  }
  return out;
}

}  // namespace

double null_lambda(const ObservationSet& obs, ModelKind kind) {
  const auto problems = problems_for(obs, kind);
  return null_lambda(std::span<const SliceProblem>(problems));
}

ModelFit fit_model(const ObservationSet& obs, ModelKind kind,
                   const SolverConfig& config,
                   std::span<const AtomicDecomposition> warm, int threads) {
  ModelFit out;
  out.model.kind = kind;
  out.model.classes = obs.classes();
  out.model.rows = obs.rows();
  out.model.cols = obs.cols();
  out.model.lambda = config.lambda;
  if (kind == ModelKind::gaussian) {
    if (warm.size() > 1) throw StructuralError("fit_model: one warm start expected");
    auto fit = fit_gaussian(obs, config, warm.empty() ? nullptr : &warm[0]);
    out.model.sigma_hat = fit.sigma_hat;
    out.model.slices.push_back(std::move(fit.estimate));
    out.reports.push_back(std::move(fit.report));
  } else {
    const LinkModel link(obs.classes());
    out.reports = solve_tensor(obs, link, config, warm, threads);
    for (const auto& r : out.reports) out.model.slices.push_back(r.decomposition);
  }
  return out;
}

double validation_score(const FittedModel& model, const ObservationSet& held_out) {
  if (held_out.empty()) throw DomainError("validation_score: empty held-out set");
  const auto entries = held_out.entries();
  std::vector<std::vector<double>> values;
  for (const auto& s : model.slices) values.push_back(entry_values(s, entries));
  const auto k = static_cast<std::size_t>(model.classes);
  double total = 0.0;
  if (model.kind == ModelKind::gaussian) {
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const auto c = held_out.counts(e);
      for (std::size_t j = 0; j < k; ++j) {
        const double r = static_cast<double>(j + 1) - values[0][e];
        total += c[j] * r * r;
      }
    }
  } else {
    const LinkModel link(model.classes);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const auto c = held_out.counts(e);
      for (std::size_t j = 0; j < k; ++j) {
        if (c[j] == 0) continue;
        double nll = 0.0;
        for (int l = 0; l < link.slice_count(); ++l)
          nll += link.neg_log_lik_factor(l, static_cast<int>(j) + 1,
                                         values[static_cast<std::size_t>(l)][e]);
        total += c[j] * nll;
      }
    }
  }
  return total / static_cast<double>(held_out.size());
}

CrossValidationResult cross_validate(const ObservationSet& obs, ModelKind kind,
                                     const SolverConfig& config,
                                     const CrossValidationOptions& options) {
  const int folds = options.folds;
  if (folds < 2) throw DomainError("cross_validate: need at least 2 folds");
  if (obs.size() < static_cast<std::size_t>(folds))
    throw DomainError("cross_validate: fewer observations than folds");
  if (options.patience < 0) throw DomainError("cross_validate: negative patience");

  const auto assignment = fold_assignment(obs.size(), folds, options.seed);
  std::vector<ObservationSet> train, valid;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> in, out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
      (assignment[i] == f ? out : in).push_back(i);
    if (out.empty()) throw DomainError("cross_validate: empty validation fold");
    train.push_back(obs.subset(in));
    valid.push_back(obs.subset(out));
  }

  double ceiling = null_lambda(obs, kind);
  for (const auto& t : train) ceiling = std::max(ceiling, null_lambda(t, kind));

  CrossValidationResult res;
  res.grid = LambdaGrid::geometric(ceiling, options.grid_points.value_or(grid_size(obs.size())),
                                   options.floor_ratio);
  const std::size_t points = res.grid.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  res.scores.assign(points, nan);
  res.fold_scores.assign(static_cast<std::size_t>(folds), std::vector<double>(points, nan));

  std::vector<std::vector<AtomicDecomposition>> warm(static_cast<std::size_t>(folds));
  double best = std::numeric_limits<double>::infinity();
  int worse_run = 0;
  for (std::size_t i = 0; i < points; ++i) {
    SolverConfig cfg = config;
    cfg.lambda = res.grid.values[i];
    parallel_for(static_cast<std::size_t>(folds), options.threads, [&](std::size_t f) {
      auto fit = fit_model(train[f], kind, cfg, warm[f], 1);
      res.fold_scores[f][i] = validation_score(fit.model, valid[f]);
      warm[f] = std::move(fit.model.slices);
    });
    double mean = 0.0;
    for (int f = 0; f < folds; ++f) mean += res.fold_scores[static_cast<std::size_t>(f)][i];
    mean /= folds;
    res.scores[i] = mean;
    if (mean < best) {
      best = mean;
      res.best_index = i;
      worse_run = 0;
    } else if (options.patience > 0 && ++worse_run >= options.patience) {
      break;
    }
  }
  res.best_lambda = res.grid.values[res.best_index];
  return res;
}

}  // namespace mcfa
