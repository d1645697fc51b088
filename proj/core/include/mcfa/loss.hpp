#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mcfa/link.hpp"
#include "mcfa/sparse.hpp"
#include "mcfa/tensor_model.hpp"

namespace mcfa {

enum class LossKind { multinomial_factor, squared };

/// One slice's empirical objective Psi^l over the observed entries.
///
/// Multinomial (conditional logit) slice l: an observation with label j
/// contributes -log g^l_j(X_i); labels below l contribute nothing, so only
/// entries with some label >= l enter the problem. With a_e = #{label = l}/n
/// and b_e = #{label > l}/n at grouped entry e,
///   Psi^l(W) = sum_e a_e softplus(-W_e) + b_e softplus(W_e).
///
/// Squared: Psi(W) = (1/n) sum_i (Y_i - W_i)^2 with labels read as reals.
///
/// n is always the total number of draws in the observation set.
class SliceProblem {
 public:
  static SliceProblem multinomial(const ObservationSet& obs,
                                  const LinkModel& link, int slice);
  static SliceProblem squared(const ObservationSet& obs);

  LossKind kind() const noexcept { return kind_; }
  int slice() const noexcept { return slice_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t total_count() const noexcept { return n_; }
  std::size_t entry_count() const noexcept { return entries_->size(); }
  std::span<const EntryIndex> entries() const noexcept { return *entries_; }
  const std::shared_ptr<const std::vector<EntryIndex>>& pattern() const noexcept {
    return entries_;
  }
  /// Number of draws at entry e (duplicates included).
  double multiplicity(std::size_t e) const noexcept;

  /// Psi at the given entry values (one per entry in `entries()`).
  double objective(std::span<const double> w) const;
  /// dPsi/dW_e at each entry.
  void gradient_values(std::span<const double> w, std::span<double> out) const;
  /// d^2 Psi / dW_e^2 at each entry.
  void curvature_values(std::span<const double> w, std::span<double> out) const;

  /// grad Psi as a sparse m1 x m2 matrix on the observed pattern.
  SparseMatrix gradient(std::span<const double> w) const;

  /// Psi(0).
  double zero_objective() const;

 private:
  SliceProblem() = default;
  void check_length(std::size_t len) const;

  LossKind kind_ = LossKind::squared;
  int slice_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t n_ = 0;
  std::shared_ptr<const std::vector<EntryIndex>> entries_;
  // multinomial: (a_e, b_e); squared: (s0_e, s1_e, s2_e) = sums of 1, Y, Y^2
  // over the draws at e, each divided by n.
  std::vector<double> c0_, c1_, c2_;
};

/// Largest singular value of a sparse gradient.
double gradient_operator_norm(const SparseMatrix& grad);

}  // namespace mcfa
