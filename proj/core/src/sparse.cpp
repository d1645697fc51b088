#include "mcfa/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <Eigen/SVD>

#include "mcfa/errors.hpp"

namespace mcfa {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::shared_ptr<const std::vector<EntryIndex>> pattern,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), pattern_(std::move(pattern)),
      values_(std::move(values)) {
  if (!pattern_ || pattern_->size() != values_.size())
    throw StructuralError("SparseMatrix: pattern/value length mismatch");
  for (const auto& e : *pattern_)
    if (e.row >= rows_ || e.col >= cols_)
      throw StructuralError("SparseMatrix: index out of range");
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::span<const EntryIndex> entries,
                                         std::span<const double> values) {
  if (entries.size() != values.size())
    throw StructuralError("SparseMatrix: triplet length mismatch");
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> merged;
  for (std::size_t i = 0; i < entries.size(); ++i)
    merged[{entries[i].row, entries[i].col}] += values[i];
  auto pattern = std::make_shared<std::vector<EntryIndex>>();
  std::vector<double> vals;
  for (const auto& [rc, v] : merged) {
    pattern->push_back({rc.first, rc.second});
    vals.push_back(v);
  }
  return SparseMatrix(rows, cols, std::move(pattern), std::move(vals));
}

void SparseMatrix::multiply(const Vector& x, Vector& out) const {
  out.setZero(static_cast<Eigen::Index>(rows_));
  const auto& p = *pattern_;
  for (std::size_t i = 0; i < values_.size(); ++i)
    out[p[i].row] += values_[i] * x[p[i].col];
}

void SparseMatrix::multiply_transpose(const Vector& y, Vector& out) const {
  out.setZero(static_cast<Eigen::Index>(cols_));
  const auto& p = *pattern_;
  for (std::size_t i = 0; i < values_.size(); ++i)
    out[p[i].col] += values_[i] * y[p[i].row];
}

double SparseMatrix::bilinear(const Vector& u, const Vector& v) const {
  const auto& p = *pattern_;
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    s += values_[i] * u[p[i].row] * v[p[i].col];
  return s;
}

bool SparseMatrix::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v == 0.0; });
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(static_cast<Eigen::Index>(rows_),
                                    static_cast<Eigen::Index>(cols_));
  const auto& p = *pattern_;
  for (std::size_t i = 0; i < values_.size(); ++i)
    d(p[i].row, p[i].col) += values_[i];
  return d;
}

namespace {

Vector random_unit(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  const double nv = v.norm();
  if (nv == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / nv;
}

// Two passes of classical Gram-Schmidt against the first `k` columns.
void reorthogonalize(const Eigen::MatrixXd& basis, Eigen::Index k, Vector& w) {
  if (k == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Vector c = basis.leftCols(k).transpose() * w;
    w.noalias() -= basis.leftCols(k) * c;
  }
}

SingularTriplet lanczos(const SparseMatrix& a, double tol, int max_iter,
                        Vector v0) {
  const auto m = static_cast<Eigen::Index>(a.rows());
  const auto n = static_cast<Eigen::Index>(a.cols());
  const Eigen::Index kmax = std::min<Eigen::Index>({m, n, 48});

  SingularTriplet out;
  Eigen::MatrixXd ub(m, kmax), vb(n, kmax + 1);
  std::vector<double> alpha(static_cast<std::size_t>(kmax)),
      beta(static_cast<std::size_t>(kmax) + 1);
  Vector u(m), w(n);
  int total = 0;

  while (true) {
    vb.col(0) = v0;
    beta[0] = 0.0;
    for (Eigen::Index j = 0; j < kmax; ++j) {
      a.multiply(vb.col(j), u);
      if (j > 0) u -= beta[j] * ub.col(j - 1);
      reorthogonalize(ub, j, u);
      alpha[j] = u.norm();
      ++total;
      if (alpha[j] <= 1e-300) {
        // A v_j is (numerically) in span(U); the Krylov space is exhausted.
        if (j == 0) {
          out.zero = true;
          return out;
        }
        alpha[j] = 0.0;
      } else {
        u /= alpha[j];
      }
      ub.col(j) = u;
      a.multiply_transpose(ub.col(j), w);
      w -= alpha[j] * vb.col(j);
      reorthogonalize(vb, j + 1, w);
      beta[j + 1] = w.norm();

      const Eigen::Index k = j + 1;
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        b(i, i) = alpha[i];
        if (i + 1 < k) b(i, i + 1) = beta[i + 1];
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullU |
                                                   Eigen::ComputeFullV);
      const double sigma = svd.singularValues()[0];
      const double residual = beta[k] * std::abs(svd.matrixU()(k - 1, 0));
      const bool exhausted = beta[k] <= 1e-14 * std::max(sigma, 1e-300) ||
                             k == std::min(m, n);
      const bool done = residual <= tol * sigma || exhausted;
      if (done || total >= max_iter || k == kmax) {
        out.u = ub.leftCols(k) * svd.matrixU().col(0);
        out.v = vb.leftCols(k) * svd.matrixV().col(0);
        out.sigma = sigma;
        out.iterations = total;
        out.converged = done;
        if (done || total >= max_iter) {
          out.u.normalize();
          out.v.normalize();
          return out;
        }
        v0 = out.v.normalized();
        break;
      }
      vb.col(j + 1) = w / beta[k];
    }
  }
}

SingularTriplet power(const SparseMatrix& a, double tol, int max_iter,
                      Vector v) {
  SingularTriplet out;
  Vector av, w;
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    a.multiply(v, av);
    const double sigma = av.norm();
    if (sigma == 0.0) {
      out.zero = true;
      return out;
    }
    a.multiply_transpose(av, w);
    v = w / w.norm();
    out.iterations = it;
    if (std::abs(sigma - prev) <= tol * sigma) {
      out.converged = true;
      break;
    }
    prev = sigma;
  }
  a.multiply(v, av);
  out.sigma = av.norm();
  out.u = av / out.sigma;
  out.v = std::move(v);
  return out;
}

}  // namespace

SingularTriplet top_singular_pair(const SparseMatrix& a, double tol,
                                  int max_iter, std::uint64_t seed,
                                  SingularMethod method, const Vector* start) {
  if (a.rows() == 0 || a.cols() == 0 || a.is_zero()) {
    SingularTriplet z;
    z.zero = true;
    return z;
  }
  Vector v0 = (start && start->size() == static_cast<Eigen::Index>(a.cols()) &&
               start->norm() > 0)
                  ? Vector(start->normalized())
                  : random_unit(static_cast<Eigen::Index>(a.cols()), seed);
  auto t = method == SingularMethod::lanczos ? lanczos(a, tol, max_iter, v0)
                                             : power(a, tol, max_iter, v0);
  if (!t.zero && !(std::isfinite(t.sigma)))
    throw NumericalError("top_singular_pair: non-finite singular value");
  return t;
}

double operator_norm(const SparseMatrix& a) {
  const auto t = top_singular_pair(a, 1e-13, 20000, 0x9e3779b97f4a7c15ULL);
  return t.zero ? 0.0 : t.sigma;
}

}  // namespace mcfa
