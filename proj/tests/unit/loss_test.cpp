#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mcfa/errors.hpp"
#include "mcfa/link.hpp"
#include "mcfa/loss.hpp"
#include "support.hpp"

using namespace mcfa;

namespace {

// Per-record objective straight from the definition, one draw at a time.
double naive_multinomial(const ObservationSet& obs, int slice, const DenseMatrix& w) {
  const int l = slice + 1;
  long double s = 0;
  for (const auto& r : obs.records()) {
    const double x = w(r.row, r.col);
    const int j = static_cast<int>(r.label);
    if (j == l) s += testing_support::log1pexp(-x);  // -log sigma(x)
    else if (j > l) s += testing_support::log1pexp(x);  // -log sigma(-x)
  }
  return static_cast<double>(s / static_cast<long double>(obs.size()));
}

double naive_squared(const ObservationSet& obs, const DenseMatrix& w) {
  long double s = 0;
  for (const auto& r : obs.records()) {
    const double d = r.label - w(r.row, r.col);
    s += d * d;
  }
  return static_cast<double>(s / static_cast<long double>(obs.size()));
}

std::vector<double> at_entries(const SliceProblem& p, const DenseMatrix& w) {
  std::vector<double> out;
  for (const auto& e : p.entries()) out.push_back(w(e.row, e.col));
  return out;
}

}  // namespace

TEST(SliceObjective, BinomialAtZeroIsLogTwo) {
  std::mt19937_64 rng(31);
  const auto obs = testing_support::random_observations(rng, 6, 5, 2, 40);
  const auto p = SliceProblem::multinomial(obs, LinkModel(2), 0);
  EXPECT_NEAR(p.zero_objective(), std::log(2.0), 1e-15);
}

TEST(SliceObjective, SquaredLossVanishesAtLabels) {
  const ObservationSet obs(2, 2, 5, {{0, 0, 3}, {1, 1, 5}, {0, 1, 1}});
  const auto p = SliceProblem::squared(obs);
  std::vector<double> w(p.entry_count());
  for (std::size_t e = 0; e < w.size(); ++e) {
    const auto c = obs.counts(e);
    for (int j = 0; j < 5; ++j)
      if (c[static_cast<std::size_t>(j)]) w[e] = j + 1;
  }
  EXPECT_NEAR(p.objective(w), 0.0, 1e-15);
}

TEST(SliceObjective, MatchesNaivePerRecordSum) {
  std::mt19937_64 rng(32);
  for (int classes : {2, 3, 5}) {
    const auto obs = testing_support::random_observations(rng, 5, 4, classes, 20);
    const LinkModel link(classes);
    const DenseMatrix w = testing_support::random_matrix(rng, 5, 4, 2.0);
    for (int l = 0; l < link.slice_count(); ++l) {
      const auto p = SliceProblem::multinomial(obs, link, l);
      EXPECT_NEAR(p.objective(at_entries(p, w)), naive_multinomial(obs, l, w), 1e-14);
    }
    const auto sq = SliceProblem::squared(obs);
    EXPECT_NEAR(sq.objective(at_entries(sq, w)), naive_squared(obs, w), 1e-12);
  }
}

TEST(SliceObjective, SlicesSumToFullNegativeLogLikelihood) {
  std::mt19937_64 rng(33);
  const int classes = 4;
  const LinkModel link(classes);
  const auto obs = testing_support::random_observations(rng, 6, 6, classes, 60);
  std::vector<DenseMatrix> w;
  for (int l = 0; l < classes - 1; ++l) w.push_back(testing_support::random_matrix(rng, 6, 6));
  double full = 0.0;
  std::vector<double> x(classes - 1);
  for (const auto& r : obs.records()) {
    for (int l = 0; l < classes - 1; ++l) x[static_cast<std::size_t>(l)] = w[static_cast<std::size_t>(l)](r.row, r.col);
    full -= std::log(link.class_probabilities(x)[r.label - 1]);
  }
  full /= static_cast<double>(obs.size());
  double sum = 0.0;
  for (int l = 0; l < classes - 1; ++l) {
    const auto p = SliceProblem::multinomial(obs, link, l);
    sum += p.objective(at_entries(p, w[static_cast<std::size_t>(l)]));
  }
  EXPECT_NEAR(sum, full, 1e-12);
}

TEST(SliceObjective, OnlyEntriesWithLabelsAtOrAboveSliceEnter) {
  const ObservationSet obs(3, 3, 3, {{0, 0, 1}, {1, 1, 2}, {2, 2, 3}, {0, 0, 1}});
  const auto p = SliceProblem::multinomial(obs, LinkModel(3), 1);
  EXPECT_EQ(p.entry_count(), 2u);
  EXPECT_EQ(p.total_count(), 4u);
  EXPECT_THROW(p.objective(std::vector<double>(3, 0.0)), StructuralError);
}

TEST(SliceGradient, SingleObservation) {
  const ObservationSet obs(2, 2, 2, {{0, 0, 1}});
  const auto p = SliceProblem::multinomial(obs, LinkModel(2), 0);
  const auto g = p.gradient(std::vector<double>{0.0});
  ASSERT_EQ(g.nonzeros(), 1u);
  EXPECT_EQ(g.pattern()[0], (EntryIndex{0, 0}));
  EXPECT_NEAR(g.values()[0], -0.5, 1e-15);
}

TEST(SliceGradient, OppositeLabelsCancel) {
  const ObservationSet obs(1, 1, 2, {{0, 0, 1}, {0, 0, 2}});
  const auto p = SliceProblem::multinomial(obs, LinkModel(2), 0);
  EXPECT_NEAR(p.gradient(std::vector<double>{0.0}).values()[0], 0.0, 1e-16);
}

TEST(SliceGradient, MatchesCentralFiniteDifferences) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const int classes = trial % 2 ? 5 : 2;
    const auto obs = testing_support::random_observations(rng, 10, 8, classes, 60);
    const LinkModel link(classes);
    std::vector<SliceProblem> problems;
    for (int l = 0; l < link.slice_count(); ++l)
      problems.push_back(SliceProblem::multinomial(obs, link, l));
    problems.push_back(SliceProblem::squared(obs));
    for (const auto& p : problems) {
      std::normal_distribution<double> z(0.0, 1.5);
      std::vector<double> w(p.entry_count());
      for (double& v : w) v = z(rng);
      std::vector<double> g(w.size()), h(w.size());
      p.gradient_values(w, g);
      p.curvature_values(w, h);
      const double step = 1e-5;
      for (std::size_t e = 0; e < w.size(); ++e) {
        auto wp = w, wm = w;
        wp[e] += step;
        wm[e] -= step;
        const double fd = (p.objective(wp) - p.objective(wm)) / (2 * step);
        EXPECT_NEAR(g[e], fd, 1e-5 * std::max(std::abs(fd), 1e-3 / static_cast<double>(obs.size())));
        std::vector<double> gp(w.size()), gm(w.size());
        p.gradient_values(wp, gp);
        p.gradient_values(wm, gm);
        const double fd2 = (gp[e] - gm[e]) / (2 * step);
        EXPECT_NEAR(h[e], fd2, 1e-5 * std::max(std::abs(fd2), 1e-3 / static_cast<double>(obs.size())));
      }
    }
  }
}

TEST(SliceGradient, EntriesBoundedByLipschitzTimesMultiplicity) {
  std::mt19937_64 rng(35);
  const auto obs = testing_support::random_observations(rng, 5, 5, 3, 80);
  const LinkModel link(3);
  const double gamma = 1.5;
  const double L = link.constants(gamma).L;
  std::uniform_real_distribution<double> u(-gamma, gamma);
  for (int l = 0; l < 2; ++l) {
    const auto p = SliceProblem::multinomial(obs, link, l);
    std::vector<double> w(p.entry_count());
    for (double& v : w) v = u(rng);
    const auto g = p.gradient(w);
    for (std::size_t e = 0; e < w.size(); ++e)
      EXPECT_LE(std::abs(g.values()[e]), L * p.multiplicity(e) / static_cast<double>(p.total_count()) + 1e-15);
  }
}

TEST(SliceObjective, ConvexAlongSegments) {
  std::mt19937_64 rng(36);
  const auto obs = testing_support::random_observations(rng, 8, 8, 4, 100);
  const LinkModel link(4);
  std::uniform_real_distribution<double> t01(0.0, 1.0);
  for (int l = 0; l < 3; ++l) {
    const auto p = SliceProblem::multinomial(obs, link, l);
    for (int t = 0; t < 50; ++t) {
      std::normal_distribution<double> z(0.0, 3.0);
      std::vector<double> a(p.entry_count()), b(p.entry_count()), m(p.entry_count());
      for (std::size_t e = 0; e < a.size(); ++e) {
        a[e] = z(rng);
        b[e] = z(rng);
      }
      const double s = t01(rng);
      for (std::size_t e = 0; e < a.size(); ++e) m[e] = s * a[e] + (1 - s) * b[e];
      EXPECT_LE(p.objective(m), s * p.objective(a) + (1 - s) * p.objective(b) + 1e-10);
    }
  }
}

TEST(GradientOperatorNorm, ZeroSingleEntryAndDenseOracle) {
  const ObservationSet balanced(2, 2, 2, {{0, 0, 1}, {0, 0, 2}});
  const auto p = SliceProblem::multinomial(balanced, LinkModel(2), 0);
  EXPECT_EQ(gradient_operator_norm(p.gradient(std::vector<double>{0.0})), 0.0);

  std::mt19937_64 rng(37);
  const auto obs = testing_support::random_observations(rng, 30, 20, 2, 150);
  const auto q = SliceProblem::multinomial(obs, LinkModel(2), 0);
  const auto g = q.gradient(std::vector<double>(q.entry_count(), 0.3));
  const double want = testing_support::dense_sigma_max(g.to_dense());
  EXPECT_NEAR(gradient_operator_norm(g), want, 1e-8 * want);
}
