#include "mcfa/loss.hpp"

#include <cmath>

#include "mcfa/errors.hpp"

namespace mcfa {

SliceProblem SliceProblem::multinomial(const ObservationSet& obs,
                                       const LinkModel& link, int slice) {
  if (obs.classes() != link.classes())
    throw StructuralError("SliceProblem: class count differs from the link");
  if (slice < 0 || slice >= link.slice_count())
    throw StructuralError("SliceProblem: slice out of range");
  SliceProblem p;
  p.kind_ = LossKind::multinomial_factor;
  p.slice_ = slice;
  p.rows_ = obs.rows();
  p.cols_ = obs.cols();
  p.n_ = obs.size();
  auto entries = std::make_shared<std::vector<EntryIndex>>();
  const double inv_n = p.n_ > 0 ? 1.0 / static_cast<double>(p.n_) : 0.0;
  const int l = slice + 1;
  for (std::size_t e = 0; e < obs.entry_count(); ++e) {
    const auto c = obs.counts(e);
    double hit = 0.0, beyond = 0.0;
    for (int j = l; j <= obs.classes(); ++j)
      (j == l ? hit : beyond) += c[static_cast<std::size_t>(j - 1)];
    if (hit + beyond == 0.0) continue;
    entries->push_back(obs.entries()[e]);
    p.c0_.push_back(hit * inv_n);
    p.c1_.push_back(beyond * inv_n);
  }
  p.entries_ = std::move(entries);
  return p;
}

SliceProblem SliceProblem::squared(const ObservationSet& obs) {
  SliceProblem p;
  p.kind_ = LossKind::squared;
  p.rows_ = obs.rows();
  p.cols_ = obs.cols();
  p.n_ = obs.size();
  auto entries = std::make_shared<std::vector<EntryIndex>>(
      obs.entries().begin(), obs.entries().end());
  const double inv_n = p.n_ > 0 ? 1.0 / static_cast<double>(p.n_) : 0.0;
  for (std::size_t e = 0; e < obs.entry_count(); ++e) {
    const auto c = obs.counts(e);
    double s0 = 0, s1 = 0, s2 = 0;
    for (int j = 1; j <= obs.classes(); ++j) {
      const double cnt = c[static_cast<std::size_t>(j - 1)];
      s0 += cnt;
      s1 += cnt * j;
      s2 += cnt * j * j;
    }
    p.c0_.push_back(s0 * inv_n);
    p.c1_.push_back(s1 * inv_n);
    p.c2_.push_back(s2 * inv_n);
  }
  p.entries_ = std::move(entries);
  return p;
}

double SliceProblem::multiplicity(std::size_t e) const noexcept {
  const double m = kind_ == LossKind::squared ? c0_[e] : c0_[e] + c1_[e];
  return m * static_cast<double>(n_);
}

void SliceProblem::check_length(std::size_t len) const {
  if (len != entries_->size())
    throw StructuralError("SliceProblem: expected one value per observed entry");
}

double SliceProblem::objective(std::span<const double> w) const {
  check_length(w.size());
  double s = 0.0;
  if (kind_ == LossKind::multinomial_factor) {
    for (std::size_t e = 0; e < w.size(); ++e)
      s += c0_[e] * softplus(-w[e]) + c1_[e] * softplus(w[e]);
  } else {
    for (std::size_t e = 0; e < w.size(); ++e)
      s += c2_[e] - 2.0 * c1_[e] * w[e] + c0_[e] * w[e] * w[e];
  }
  return s;
}

void SliceProblem::gradient_values(std::span<const double> w,
                                   std::span<double> out) const {
  check_length(w.size());
  check_length(out.size());
  if (kind_ == LossKind::multinomial_factor) {
    // -(a sigma(-x) - b sigma(x))
    for (std::size_t e = 0; e < w.size(); ++e) {
      const double s = sigmoid(w[e]);
      out[e] = c1_[e] * s - c0_[e] * (1.0 - s);
    }
  } else {
    for (std::size_t e = 0; e < w.size(); ++e)
      out[e] = 2.0 * (c0_[e] * w[e] - c1_[e]);
  }
}

void SliceProblem::curvature_values(std::span<const double> w,
                                    std::span<double> out) const {
  check_length(w.size());
  check_length(out.size());
  if (kind_ == LossKind::multinomial_factor) {
    for (std::size_t e = 0; e < w.size(); ++e) {
      const double s = sigmoid(w[e]);
      out[e] = (c0_[e] + c1_[e]) * s * (1.0 - s);
    }
  } else {
    for (std::size_t e = 0; e < w.size(); ++e) out[e] = 2.0 * c0_[e];
  }
}

SparseMatrix SliceProblem::gradient(std::span<const double> w) const {
  std::vector<double> g(w.size());
  gradient_values(w, g);
  return SparseMatrix(rows_, cols_, entries_, std::move(g));
}

double SliceProblem::zero_objective() const {
  const std::vector<double> zero(entries_->size(), 0.0);
  return objective(zero);
}

double gradient_operator_norm(const SparseMatrix& grad) {
  return operator_norm(grad);
}

}  // namespace mcfa
