#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mcfa/tensor_model.hpp"

namespace mcfa {

/// Coordinate-format sparse matrix whose pattern is shared with the
/// observation layout it was built from.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols,
               std::shared_ptr<const std::vector<EntryIndex>> pattern,
               std::vector<double> values);
  /// Builds a matrix with its own pattern from triplets; duplicates are summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::span<const EntryIndex> entries,
                                    std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }
  std::span<const EntryIndex> pattern() const noexcept { return *pattern_; }
  std::span<const double> values() const noexcept { return values_; }

  /// out = A x
  void multiply(const Vector& x, Vector& out) const;
  /// out = A^T y
  void multiply_transpose(const Vector& y, Vector& out) const;
  /// u^T A v
  double bilinear(const Vector& u, const Vector& v) const;

  bool is_zero() const noexcept;
  DenseMatrix to_dense() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::shared_ptr<const std::vector<EntryIndex>> pattern_ =
      std::make_shared<const std::vector<EntryIndex>>();
  std::vector<double> values_;
};

enum class SingularMethod { lanczos, power };

/// Leading singular triplet. When the matrix is zero, `zero` is set and the
/// vectors are empty.
struct SingularTriplet {
  Vector u;
  Vector v;
  double sigma = 0.0;
  int iterations = 0;
  bool converged = false;
  bool zero = false;
};

/// Leading singular pair of a sparse matrix using only sparse products.
///
/// `lanczos`: Golub-Kahan bidiagonalization with full reorthogonalization and
/// explicit restarts; stops when the residual |A^T u - sigma v| <= tol * sigma.
/// `power`: power iteration on A^T A from a random start; stops when the
/// relative change of sigma drops below tol.
SingularTriplet top_singular_pair(const SparseMatrix& a, double tol,
                                  int max_iter, std::uint64_t seed,
                                  SingularMethod method = SingularMethod::lanczos,
                                  const Vector* start = nullptr);

/// Largest singular value, computed to high relative accuracy.
double operator_norm(const SparseMatrix& a);

}  // namespace mcfa
