#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mcfa/data.hpp"
#include "mcfa/errors.hpp"
#include "mcfa/tuning.hpp"
#include "support.hpp"

using namespace mcfa;

namespace {

ObservationSet synthetic(int classes, std::size_t n, std::uint64_t seed) {
  const auto t = generate_truth({.m1 = 30, .m2 = 25, .classes = classes, .seed = seed});
  return sample_observations(t, SamplingDistribution::uniform(30, 25), LinkModel(classes), n,
                             seed + 100);
}

}  // namespace

TEST(TheoreticalLambda, MatchesClosedForm) {
  // 6 L sqrt(2 nu log(m1 + m2) / (min(m1, m2) n)), evaluated in long double.
  struct Case {
    double L, nu;
    std::size_t n, m1, m2;
  } cases[] = {{0.5, 1.0, 10000, 100, 100},
               {0.5, 2.5, 250000, 1000, 600},
               {1.7, 1.0, 500, 30, 80},
               {0.25, 1.3, 1000000, 3000, 3000},
               {3.0, 4.0, 12345, 7, 9}};
  for (const auto& c : cases) {
    const long double want =
        6.0L * c.L *
        std::sqrt(2.0L * c.nu * std::log(static_cast<long double>(c.m1 + c.m2)) /
                  (static_cast<long double>(std::min(c.m1, c.m2)) * c.n));
    EXPECT_NEAR(theoretical_lambda(c.L, c.nu, c.n, c.m1, c.m2), static_cast<double>(want),
                1e-12 * static_cast<double>(want));
  }
  EXPECT_NEAR(theoretical_lambda(0.5, 1.0, 10000, 100, 100),
              3.0 * std::sqrt(2.0 * std::log(200.0) / 1e6), 1e-15);
}

TEST(TheoreticalLambda, ScalingAndValidation) {
  const double base = theoretical_lambda(0.5, 1.0, 1000, 50, 40);
  EXPECT_NEAR(theoretical_lambda(0.5, 1.0, 4000, 50, 40), base / 2, 1e-15);
  EXPECT_NEAR(theoretical_lambda(0.5, 4.0, 1000, 50, 40), base * 2, 1e-15);
  EXPECT_NEAR(theoretical_lambda(1.0, 1.0, 1000, 50, 40), base * 2, 1e-15);
  EXPECT_THROW(theoretical_lambda(0.0, 1.0, 1000, 50, 40), DomainError);
  EXPECT_THROW(theoretical_lambda(0.5, 1.0, 0, 50, 40), DomainError);
  EXPECT_THROW(theoretical_lambda(0.5, -1.0, 10, 50, 40), DomainError);
  // The link overload feeds in L_gamma.
  const LinkModel link(3);
  EXPECT_NEAR(theoretical_lambda(link, 2.0, 1.0, 1000, 50, 40),
              theoretical_lambda(link.constants(2.0).L, 1.0, 1000, 50, 40), 1e-15);
}

TEST(LambdaGrid, SizeAndGeometricSpacing) {
  EXPECT_EQ(grid_size(1000), 5u);
  EXPECT_EQ(grid_size(10000), 6u);
  EXPECT_EQ(grid_size(1), 1u);
  EXPECT_EQ(grid_size(2), 1u);
  for (std::size_t n : {3u, 50u, 100000u, 500000u})
    EXPECT_EQ(grid_size(n), static_cast<std::size_t>(std::ceil(0.6 * std::log(static_cast<double>(n)))));

  const auto g = LambdaGrid::geometric(2.0, 5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.values.front(), 2.0);
  EXPECT_NEAR(g.values.back(), 2e-3, 1e-15);
  for (std::size_t i = 1; i < 5; ++i) {
    EXPECT_LT(g.values[i], g.values[i - 1]);
    EXPECT_NEAR(g.values[i] / g.values[i - 1], std::pow(1e-3, 0.25), 1e-12);
  }
  const auto one = LambdaGrid::geometric(0.7, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.values[0], 0.7);
  EXPECT_THROW(LambdaGrid::geometric(0.0, 3), DomainError);
}

TEST(NullLambda, AgreesWithSliceProblems) {
  const auto obs = synthetic(3, 800, 1);
  const LinkModel link(3);
  const SliceProblem slices[] = {SliceProblem::multinomial(obs, link, 0),
                                 SliceProblem::multinomial(obs, link, 1)};
  EXPECT_EQ(null_lambda(obs, ModelKind::logistic), null_lambda(slices));
  const SliceProblem sq[] = {SliceProblem::squared(obs)};
  EXPECT_EQ(null_lambda(obs, ModelKind::gaussian), null_lambda(sq));
}

TEST(ValidationScore, NullModelsHaveClosedForms) {
  const auto obs = synthetic(2, 500, 2);
  FittedModel zero;
  zero.kind = ModelKind::logistic;
  zero.classes = 2;
  zero.rows = 30;
  zero.cols = 25;
  zero.slices = {AtomicDecomposition(30, 25)};
  EXPECT_NEAR(validation_score(zero, obs), std::log(2.0), 1e-13);

  zero.kind = ModelKind::gaussian;
  double mean_sq = 0;
  for (const auto& r : obs.records()) mean_sq += r.label * r.label;
  EXPECT_NEAR(validation_score(zero, obs), mean_sq / obs.size(), 1e-12);
}

TEST(CrossValidate, CeilingGivesNullModelOnEveryFold) {
  const auto obs = synthetic(2, 6000, 3);
  SolverConfig c;
  CrossValidationOptions o;
  o.grid_points = 4;
  o.seed = 7;
  const auto r = cross_validate(obs, ModelKind::logistic, c, o);
  ASSERT_EQ(r.grid.size(), 4u);
  ASSERT_EQ(r.fold_scores.size(), 5u);
  // The grid ceiling covers every training fold, so each first fit is zero
  // and scores log 2 on its held-out part.
  for (const auto& f : r.fold_scores) EXPECT_NEAR(f[0], std::log(2.0), 1e-13);
  EXPECT_NEAR(r.scores[0], std::log(2.0), 1e-13);
  EXPECT_EQ(r.best_lambda, r.grid.values[r.best_index]);
  for (double s : r.scores)
    if (!std::isnan(s)) EXPECT_GE(s, r.scores[r.best_index]);
  // With this much signal some interior or lower lambda beats the null fit.
  EXPECT_GT(r.best_index, 0u);
}

TEST(CrossValidate, GaussianCeilingAndDeterminism) {
  const auto obs = synthetic(3, 1200, 4);
  SolverConfig c;
  CrossValidationOptions o;
  o.grid_points = 3;
  o.seed = 11;
  const auto a = cross_validate(obs, ModelKind::gaussian, c, o);
  const auto folds = fold_assignment(obs.size(), 5, 11);
  for (int f = 0; f < 5; ++f) {
    double s = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < obs.size(); ++i)
      if (folds[i] == f) {
        s += obs.records()[i].label * obs.records()[i].label;
        ++n;
      }
    EXPECT_NEAR(a.fold_scores[static_cast<std::size_t>(f)][0], s / n, 1e-12);
  }
  const auto b = cross_validate(obs, ModelKind::gaussian, c, o);
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(a.best_index, b.best_index);
  o.threads = 2;
  const auto t = cross_validate(obs, ModelKind::gaussian, c, o);
  EXPECT_EQ(a.scores, t.scores);
}

TEST(CrossValidate, PatienceStopsTheWalk) {
  const auto obs = synthetic(2, 600, 5);
  SolverConfig c;
  CrossValidationOptions o;
  o.grid_points = 8;
  o.patience = 1;
  const auto r = cross_validate(obs, ModelKind::logistic, c, o);
  std::size_t evaluated = 0;
  for (double s : r.scores) evaluated += !std::isnan(s);
  // Evaluation is a prefix, ending at most one point past the best.
  for (std::size_t i = 0; i < evaluated; ++i) EXPECT_FALSE(std::isnan(r.scores[i]));
  EXPECT_LE(evaluated, r.best_index + 2);
  o.patience = -1;
  EXPECT_THROW(cross_validate(obs, ModelKind::logistic, c, o), DomainError);
}

TEST(FitModel, WarmStartReachesTheColdObjective) {
  const auto obs = synthetic(3, 2000, 6);
  SolverConfig c;
  c.lambda = 0.2 * null_lambda(obs, ModelKind::logistic);
  c.epsilon = 1e-6;
  const auto cold = fit_model(obs, ModelKind::logistic, c);
  SolverConfig prev = c;
  prev.lambda = 0.4 * null_lambda(obs, ModelKind::logistic);
  const auto start = fit_model(obs, ModelKind::logistic, prev);
  const auto warm = fit_model(obs, ModelKind::logistic, c, start.model.slices);
  ASSERT_EQ(warm.reports.size(), 2u);
  for (std::size_t l = 0; l < 2; ++l) {
    EXPECT_TRUE(warm.reports[l].converged);
    EXPECT_NEAR(warm.reports[l].objective_trace.back(), cold.reports[l].objective_trace.back(),
                1e-4);
  }
  EXPECT_EQ(cold.model.kind, ModelKind::logistic);
  EXPECT_EQ(cold.model.lambda, c.lambda);

  const auto g = fit_model(obs, ModelKind::gaussian, c);
  EXPECT_EQ(g.model.slices.size(), 1u);
  EXPECT_GT(g.model.sigma_hat, 0.0);
}
