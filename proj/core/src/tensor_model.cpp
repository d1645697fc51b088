#include "mcfa/tensor_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mcfa/errors.hpp"

namespace mcfa {

ObservationSet::ObservationSet(std::size_t rows, std::size_t cols, int classes,
                               std::vector<Observation> records)
    : rows_(rows), cols_(cols), classes_(classes), records_(std::move(records)) {
  if (classes_ < 2) throw DomainError("ObservationSet: need at least 2 classes");
  for (const auto& r : records_) {
    if (r.row >= rows_ || r.col >= cols_)
      throw StructuralError("ObservationSet: index (" + std::to_string(r.row) +
                            ", " + std::to_string(r.col) + ") out of range");
    if (r.label < 1 || r.label > static_cast<std::uint32_t>(classes_))
      throw StructuralError("ObservationSet: label " + std::to_string(r.label) +
                            " outside 1.." + std::to_string(classes_));
  }

  std::vector<std::uint32_t> order(records_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const auto& x = records_[a];
    const auto& y = records_[b];
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });

  const auto k = static_cast<std::size_t>(classes_);
  for (std::uint32_t idx : order) {
    const auto& r = records_[idx];
    if (entries_.empty() || entries_.back().row != r.row ||
        entries_.back().col != r.col) {
      entries_.push_back({r.row, r.col});
      counts_.resize(counts_.size() + k, 0);
    }
    ++counts_[(entries_.size() - 1) * k + (r.label - 1)];
  }
}

ObservationSet ObservationSet::subset(
    std::span<const std::size_t> positions) const {
  std::vector<Observation> picked;
  picked.reserve(positions.size());
  for (std::size_t p : positions) picked.push_back(records_.at(p));
  return ObservationSet(rows_, cols_, classes_, std::move(picked));
}

ParameterTensor::ParameterTensor(std::vector<DenseMatrix> slices,
                                 std::optional<double> gamma)
    : slices_(std::move(slices)), gamma_(gamma) {
  if (slices_.empty())
    throw StructuralError("ParameterTensor: at least one slice required");
  rows_ = static_cast<std::size_t>(slices_.front().rows());
  cols_ = static_cast<std::size_t>(slices_.front().cols());
  for (const auto& s : slices_) {
    if (static_cast<std::size_t>(s.rows()) != rows_ ||
        static_cast<std::size_t>(s.cols()) != cols_)
      throw StructuralError("ParameterTensor: slices differ in shape");
  }
  if (gamma_) {
    if (!(*gamma_ > 0)) throw DomainError("ParameterTensor: gamma must be > 0");
    if (sup_norm() > *gamma_)
      throw DomainError("ParameterTensor: sup norm exceeds gamma");
  }
}

ParameterTensor::ParameterTensor(std::size_t rows, std::size_t cols,
                                 int slice_count)
    : rows_(rows), cols_(cols) {
  if (slice_count < 1)
    throw StructuralError("ParameterTensor: at least one slice required");
  slices_.assign(static_cast<std::size_t>(slice_count),
                 DenseMatrix::Zero(static_cast<Eigen::Index>(rows),
                                   static_cast<Eigen::Index>(cols)));
}

void ParameterTensor::entry(std::size_t row, std::size_t col,
                            std::span<double> out) const {
  const auto r = static_cast<Eigen::Index>(row);
  const auto c = static_cast<Eigen::Index>(col);
  for (std::size_t l = 0; l < slices_.size(); ++l) out[l] = slices_[l](r, c);
}

double ParameterTensor::sup_norm() const {
  double m = 0.0;
  for (const auto& s : slices_)
    if (s.size() > 0) m = std::max(m, s.cwiseAbs().maxCoeff());
  return m;
}

Atom::Atom(Vector u, Vector v) : u_(std::move(u)), v_(std::move(v)) {
  const double nu = u_.norm();
  const double nv = v_.norm();
  if (!(nu > 0) || !(nv > 0) || !std::isfinite(nu) || !std::isfinite(nv))
    throw DomainError("Atom: factors must be finite and nonzero");
  // Unit factors keep their exact bits so that saved models reload unchanged.
  constexpr double unit_slack = 8 * std::numeric_limits<double>::epsilon();
  if (std::abs(nu - 1.0) > unit_slack) u_ /= nu;
  if (std::abs(nv - 1.0) > unit_slack) v_ /= nv;
}

AtomicDecomposition::AtomicDecomposition(std::size_t rows, std::size_t cols,
                                         std::vector<Atom> atoms,
                                         std::vector<double> weights)
    : rows_(rows), cols_(cols) {
  if (atoms.size() != weights.size())
    throw StructuralError("AtomicDecomposition: atoms/weights length mismatch");
  for (std::size_t k = 0; k < atoms.size(); ++k) add(atoms[k], weights[k]);
}

void AtomicDecomposition::check_atom(const Atom& atom) const {
  if (static_cast<std::size_t>(atom.u().size()) != rows_ ||
      static_cast<std::size_t>(atom.v().size()) != cols_)
    throw StructuralError("AtomicDecomposition: atom shape mismatch");
}

void AtomicDecomposition::add(Atom atom, double weight) {
  check_atom(atom);
  if (!(weight >= 0) || !std::isfinite(weight))
    throw DomainError("AtomicDecomposition: weights must be finite and >= 0");
  atoms_.push_back(std::move(atom));
  weights_.push_back(weight);
}

void AtomicDecomposition::set_weights(std::vector<double> weights) {
  if (weights.size() != atoms_.size())
    throw StructuralError("AtomicDecomposition: weight count mismatch");
  for (double w : weights)
    if (!(w >= 0) || !std::isfinite(w))
      throw DomainError("AtomicDecomposition: weights must be finite and >= 0");
  weights_ = std::move(weights);
}

void AtomicDecomposition::prune(double threshold) {
  std::size_t out = 0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (weights_[k] < threshold) continue;
    if (out != k) {
      atoms_[out] = std::move(atoms_[k]);
      weights_[out] = weights_[k];
    }
    ++out;
  }
  atoms_.erase(atoms_.begin() + static_cast<std::ptrdiff_t>(out), atoms_.end());
  weights_.resize(out);
}

double AtomicDecomposition::l1_norm() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

DenseMatrix reconstruct(const AtomicDecomposition& decomp) {
  DenseMatrix w = DenseMatrix::Zero(static_cast<Eigen::Index>(decomp.rows()),
                                    static_cast<Eigen::Index>(decomp.cols()));
  const auto atoms = decomp.atoms();
  const auto weights = decomp.weights();
  for (std::size_t k = 0; k < atoms.size(); ++k)
    w.noalias() += weights[k] * atoms[k].u() * atoms[k].v().transpose();
  return w;
}

std::vector<double> entry_values(const AtomicDecomposition& decomp,
                                 std::span<const EntryIndex> entries) {
  for (const auto& e : entries)
    if (e.row >= decomp.rows() || e.col >= decomp.cols())
      throw StructuralError("entry_values: index out of range");
  std::vector<double> out(entries.size(), 0.0);
  const auto atoms = decomp.atoms();
  const auto weights = decomp.weights();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const double* u = atoms[k].u().data();
    const double* v = atoms[k].v().data();
    const double w = weights[k];
    for (std::size_t i = 0; i < entries.size(); ++i)
      out[i] += w * u[entries[i].row] * v[entries[i].col];
  }
  return out;
}

AtomicDecomposition compact(const AtomicDecomposition& decomp, double tol) {
  AtomicDecomposition out(decomp.rows(), decomp.cols());
  std::vector<Atom> kept;
  std::vector<double> weights;
  const auto atoms = decomp.atoms();
  const auto w = decomp.weights();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    bool merged = false;
    for (std::size_t j = 0; j < kept.size(); ++j) {
      const double cu = kept[j].u().dot(atoms[k].u());
      const double cv = kept[j].v().dot(atoms[k].v());
      // u v^T is invariant under (u, v) -> (-u, -v) only.
      if (std::abs(cu) >= 1.0 - tol && std::abs(cv) >= 1.0 - tol &&
          cu * cv > 0) {
        weights[j] += w[k];
        merged = true;
        break;
      }
    }
    if (!merged) {
      kept.push_back(atoms[k]);
      weights.push_back(w[k]);
    }
  }
  return AtomicDecomposition(decomp.rows(), decomp.cols(), std::move(kept),
                             std::move(weights));
}

ParameterTensor to_tensor(std::span<const AtomicDecomposition> slices) {
  std::vector<DenseMatrix> dense;
  dense.reserve(slices.size());
  for (const auto& s : slices) dense.push_back(reconstruct(s));
  return ParameterTensor(std::move(dense));
}

}  // namespace mcfa
