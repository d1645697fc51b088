#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mcfa/errors.hpp"
#include "mcfa/tensor_model.hpp"
#include "support.hpp"

using namespace mcfa;
using testing_support::random_unit;

namespace {

Vector basis(int size, int i) {
  Vector e = Vector::Zero(size);
  e[i] = 1.0;
  return e;
}

AtomicDecomposition random_decomposition(std::mt19937_64& rng, int m1, int m2, int atoms) {
  std::uniform_real_distribution<double> w(0.1, 2.0);
  AtomicDecomposition d(static_cast<std::size_t>(m1), static_cast<std::size_t>(m2));
  for (int k = 0; k < atoms; ++k) d.add(Atom(random_unit(rng, m1), random_unit(rng, m2)), w(rng));
  return d;
}

}  // namespace

TEST(ObservationSet, GroupsDuplicatesWithCounts) {
  const ObservationSet obs(3, 4, 3, {{2, 1, 1}, {0, 3, 2}, {2, 1, 3}, {2, 1, 1}, {0, 0, 2}});
  EXPECT_EQ(obs.size(), 5u);
  ASSERT_EQ(obs.entry_count(), 3u);
  EXPECT_EQ(obs.entries()[0], (EntryIndex{0, 0}));
  EXPECT_EQ(obs.entries()[1], (EntryIndex{0, 3}));
  EXPECT_EQ(obs.entries()[2], (EntryIndex{2, 1}));
  const auto c = obs.counts(2);
  EXPECT_EQ(c[0], 2u);
  EXPECT_EQ(c[1], 0u);
  EXPECT_EQ(c[2], 1u);
  // Records keep their input order.
  EXPECT_EQ(obs.records()[1], (Observation{0, 3, 2}));
}

TEST(ObservationSet, ValidatesIndicesAndLabels) {
  EXPECT_THROW(ObservationSet(2, 2, 2, {{2, 0, 1}}), StructuralError);
  EXPECT_THROW(ObservationSet(2, 2, 2, {{0, 2, 1}}), StructuralError);
  EXPECT_THROW(ObservationSet(2, 2, 2, {{0, 0, 3}}), StructuralError);
  EXPECT_THROW(ObservationSet(2, 2, 2, {{0, 0, 0}}), StructuralError);
  EXPECT_THROW(ObservationSet(2, 2, 1, {}), DomainError);
  EXPECT_NO_THROW(ObservationSet(2, 2, 2, {}));
}

TEST(ObservationSet, SubsetKeepsOrder) {
  const ObservationSet obs(3, 3, 2, {{0, 0, 1}, {1, 1, 2}, {2, 2, 1}, {0, 1, 2}});
  const std::size_t pick[] = {3, 1};
  const auto s = obs.subset(pick);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.records()[0], (Observation{0, 1, 2}));
  EXPECT_EQ(s.records()[1], (Observation{1, 1, 2}));
}

TEST(ParameterTensor, ShapesAndGammaBound) {
  DenseMatrix a = DenseMatrix::Constant(2, 3, 0.5);
  DenseMatrix b = DenseMatrix::Constant(2, 3, -1.0);
  const ParameterTensor t({a, b}, 1.0);
  EXPECT_EQ(t.classes(), 3);
  EXPECT_EQ(t.sup_norm(), 1.0);
  std::vector<double> x(2);
  t.entry(1, 2, x);
  EXPECT_EQ(x[0], 0.5);
  EXPECT_EQ(x[1], -1.0);
  EXPECT_THROW(ParameterTensor({a, b}, 0.9), DomainError);
  EXPECT_THROW(ParameterTensor({a, DenseMatrix::Zero(3, 2)}), StructuralError);
}

TEST(Atom, RenormalizesAndRejectsZero) {
  const Atom a(Vector::Constant(4, 3.0), Vector::Constant(2, -1.0));
  EXPECT_NEAR(a.u().norm(), 1.0, 1e-15);
  EXPECT_NEAR(a.v().norm(), 1.0, 1e-15);
  EXPECT_THROW(Atom(Vector::Zero(3), Vector::Ones(2)), DomainError);
  Vector bad = Vector::Ones(2);
  bad[0] = NAN;
  EXPECT_THROW(Atom(bad, Vector::Ones(2)), DomainError);
}

TEST(Reconstruct, EmptyAndCanonicalAtoms) {
  AtomicDecomposition d(3, 4);
  EXPECT_TRUE(reconstruct(d).isZero(0));
  d.add(Atom(basis(3, 0), basis(4, 0)), 3.0);
  const auto w = reconstruct(d);
  EXPECT_EQ(w(0, 0), 3.0);
  EXPECT_EQ(w.cwiseAbs().sum(), 3.0);

  AtomicDecomposition e(3, 4);
  e.add(Atom(basis(3, 1), basis(4, 2)), 2.0);
  const EntryIndex at[] = {{1, 2}, {0, 0}};
  const auto v = entry_values(e, at);
  EXPECT_EQ(v[0], 2.0);
  EXPECT_EQ(v[1], 0.0);
}

TEST(Reconstruct, MatchesNaiveLoop) {
  std::mt19937_64 rng(11);
  const Atom a(random_unit(rng, 6), random_unit(rng, 5));
  const Atom b(random_unit(rng, 6), random_unit(rng, 5));
  const AtomicDecomposition d(6, 5, {a, b}, {1.5, 0.7});
  const auto w = reconstruct(d);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 5; ++j)
      EXPECT_NEAR(w(i, j), 1.5 * a.u()[i] * a.v()[j] + 0.7 * b.u()[i] * b.v()[j], 1e-15);
}

TEST(Reconstruct, RejectsMismatchedShapesAndNegativeWeights) {
  AtomicDecomposition d(3, 3);
  EXPECT_THROW(d.add(Atom(Vector::Ones(4), Vector::Ones(3)), 1.0), StructuralError);
  EXPECT_THROW(d.add(Atom(Vector::Ones(3), Vector::Ones(3)), -1.0), DomainError);
  d.add(Atom(Vector::Ones(3), Vector::Ones(3)), 1.0);
  EXPECT_THROW(d.set_weights({1.0, 2.0}), StructuralError);
}

TEST(EntryValues, MatchDenseReconstruction) {
  std::mt19937_64 rng(12);
  const auto d = random_decomposition(rng, 9, 7, 10);
  const auto dense = reconstruct(d);
  std::uniform_int_distribution<std::uint32_t> r(0, 8), c(0, 6);
  std::vector<EntryIndex> at(50);
  for (auto& e : at) e = {r(rng), c(rng)};
  const auto v = entry_values(d, at);
  for (std::size_t i = 0; i < at.size(); ++i)
    EXPECT_NEAR(v[i], dense(at[i].row, at[i].col), 1e-12);
  const EntryIndex out_of_range[] = {{9, 0}};
  EXPECT_THROW(entry_values(d, out_of_range), StructuralError);
}

TEST(AtomicNorm, NuclearNormBoundedByWeightSum) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    const auto d = random_decomposition(rng, 12, 9, 1 + t % 6);
    EXPECT_LE(testing_support::dense_nuclear(reconstruct(d)), d.l1_norm() + 1e-10);
  }
}

TEST(AtomicNorm, EqualityForOrthogonalAtoms) {
  std::mt19937_64 rng(14);
  const auto u = testing_support::random_matrix(rng, 10, 4);
  const auto v = testing_support::random_matrix(rng, 8, 4);
  const Eigen::MatrixXd qu = Eigen::HouseholderQR<Eigen::MatrixXd>(u).householderQ() *
                             Eigen::MatrixXd::Identity(10, 4);
  const Eigen::MatrixXd qv = Eigen::HouseholderQR<Eigen::MatrixXd>(v).householderQ() *
                             Eigen::MatrixXd::Identity(8, 4);
  AtomicDecomposition d(10, 8);
  const double w[] = {3.0, 1.0, 0.5, 0.25};
  for (int k = 0; k < 4; ++k) d.add(Atom(qu.col(k), qv.col(k)), w[k]);
  EXPECT_NEAR(testing_support::dense_nuclear(reconstruct(d)), d.l1_norm(), 1e-8);
}

TEST(Compact, MergesColinearAtomsAndPreservesMatrix) {
  std::mt19937_64 rng(15);
  const Vector u = random_unit(rng, 5), v = random_unit(rng, 4);
  const Vector u2 = random_unit(rng, 5), v2 = random_unit(rng, 4);
  AtomicDecomposition d(5, 4);
  d.add(Atom(u, v), 1.0);
  d.add(Atom(u2, v2), 0.5);
  d.add(Atom(-u, -v), 2.0);  // same matrix u v^T
  d.add(Atom(u, -v), 0.25);  // opposite matrix: must stay separate
  const auto c = compact(d);
  EXPECT_EQ(c.size(), 3u);
  EXPECT_NEAR((reconstruct(c) - reconstruct(d)).norm(), 0.0, 1e-12);
}

TEST(Prune, DropsSmallWeights) {
  AtomicDecomposition d(2, 2);
  d.add(Atom(Vector::Ones(2), Vector::Ones(2)), 1.0);
  d.add(Atom(basis(2, 0), basis(2, 1)), 1e-14);
  d.prune(1e-12);
  EXPECT_EQ(d.size(), 1u);
  EXPECT_EQ(d.l1_norm(), 1.0);
}

TEST(ToTensor, StacksSlices) {
  AtomicDecomposition a(2, 2), b(2, 2);
  a.add(Atom(basis(2, 0), basis(2, 0)), 1.0);
  b.add(Atom(basis(2, 1), basis(2, 1)), 2.0);
  const AtomicDecomposition both[] = {a, b};
  const auto t = to_tensor(both);
  EXPECT_EQ(t.slice_count(), 2);
  EXPECT_EQ(t.slice(0)(0, 0), 1.0);
  EXPECT_EQ(t.slice(1)(1, 1), 2.0);
}
