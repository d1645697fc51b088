#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace mcfa {

using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Zero-based (row, col) coordinate of a matrix entry.
struct EntryIndex {
  std::uint32_t row = 0;
  std::uint32_t col = 0;

  friend bool operator==(const EntryIndex&, const EntryIndex&) = default;
};

/// One revealed sample. `label` is a class in 1..K.
struct Observation {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  std::uint32_t label = 1;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// The i.i.d. sample (omega_i, Y_i), i = 1..n.
///
/// Records are kept in the order given. A grouped view lists every distinct
/// observed entry once (sorted by row, then column) together with its
/// per-class counts, so likelihood terms for repeated draws of one entry are
/// evaluated once with a multiplicity.
class ObservationSet {
 public:
  ObservationSet() = default;
  ObservationSet(std::size_t rows, std::size_t cols, int classes,
                 std::vector<Observation> records);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  int classes() const noexcept { return classes_; }
  /// Total number of draws n, duplicates included.
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  std::span<const Observation> records() const noexcept { return records_; }

  std::size_t entry_count() const noexcept { return entries_.size(); }
  std::span<const EntryIndex> entries() const noexcept { return entries_; }
  /// Counts of labels 1..K at grouped entry `e`.
  std::span<const std::uint32_t> counts(std::size_t e) const noexcept {
    return {counts_.data() + e * static_cast<std::size_t>(classes_),
            static_cast<std::size_t>(classes_)};
  }

  /// Subset by record positions (order preserved).
  ObservationSet subset(std::span<const std::size_t> positions) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  int classes_ = 2;
  std::vector<Observation> records_;
  std::vector<EntryIndex> entries_;
  std::vector<std::uint32_t> counts_;
};

/// The (K-1)-slice parameter tensor X, one m1 x m2 matrix per slice.
class ParameterTensor {
 public:
  ParameterTensor() = default;
  ParameterTensor(std::vector<DenseMatrix> slices,
                  std::optional<double> gamma = std::nullopt);
  /// All-zero tensor.
  ParameterTensor(std::size_t rows, std::size_t cols, int slice_count);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  int slice_count() const noexcept { return static_cast<int>(slices_.size()); }
  int classes() const noexcept { return slice_count() + 1; }
  const std::optional<double>& gamma() const noexcept { return gamma_; }

  const DenseMatrix& slice(int l) const { return slices_.at(l); }
  std::span<const DenseMatrix> slices() const noexcept { return slices_; }

  /// (X^1_{k,k'}, ..., X^q_{k,k'}) written into `out` (size q).
  void entry(std::size_t row, std::size_t col, std::span<double> out) const;

  /// max over slices of the entry-wise sup norm.
  double sup_norm() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<DenseMatrix> slices_;
  std::optional<double> gamma_;
};

/// A normalized rank-one matrix u v^T with |u| = |v| = 1.
class Atom {
 public:
  static constexpr double kUnitTolerance = 1e-10;

  /// Renormalizes both factors; throws DomainError on a zero or non-finite
  /// factor.
  Atom(Vector u, Vector v);

  const Vector& u() const noexcept { return u_; }
  const Vector& v() const noexcept { return v_; }
  double at(std::size_t row, std::size_t col) const {
    return u_[static_cast<Eigen::Index>(row)] *
           v_[static_cast<Eigen::Index>(col)];
  }

 private:
  Vector u_;
  Vector v_;
};

/// theta in Theta_+: finitely many atoms with nonnegative weights.
/// W_theta = sum_k w_k u_k v_k^T.
class AtomicDecomposition {
 public:
  AtomicDecomposition() = default;
  AtomicDecomposition(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols) {}
  AtomicDecomposition(std::size_t rows, std::size_t cols,
                      std::vector<Atom> atoms, std::vector<double> weights);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::span<const double> weights() const noexcept { return weights_; }

  void add(Atom atom, double weight);
  void set_weights(std::vector<double> weights);
  /// Drops atoms whose weight is below `threshold`.
  void prune(double threshold);

  /// ||theta||_1 = sum of weights.
  double l1_norm() const;

 private:
  void check_atom(const Atom& atom) const;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Atom> atoms_;
  std::vector<double> weights_;
};

/// Dense W_theta.
DenseMatrix reconstruct(const AtomicDecomposition& decomp);

/// W_theta evaluated only at `entries`.
std::vector<double> entry_values(const AtomicDecomposition& decomp,
                                 std::span<const EntryIndex> entries);

/// Merges atoms whose (u, v) pairs are colinear within `tol` (up to a joint
/// sign flip that leaves u v^T unchanged). W_theta is preserved.
AtomicDecomposition compact(const AtomicDecomposition& decomp,
                            double tol = 1e-9);

/// Stacks per-slice decompositions into a dense tensor.
ParameterTensor to_tensor(std::span<const AtomicDecomposition> slices);

}  // namespace mcfa
