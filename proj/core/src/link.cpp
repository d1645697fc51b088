#include "mcfa/link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "mcfa/errors.hpp"

namespace mcfa {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

LinkModel::LinkModel(int classes) : classes_(classes) {
  if (classes_ < 2) throw DomainError("LinkModel: need at least 2 classes");
}

void LinkModel::check(int slice, int label) const {
  if (slice < 0 || slice >= slice_count())
    throw StructuralError("LinkModel: slice " + std::to_string(slice) +
                          " out of range");
  if (label < 1 || label > classes_)
    throw StructuralError("LinkModel: label " + std::to_string(label) +
                          " out of range");
}

std::vector<double> LinkModel::class_probabilities(
    std::span<const double> x) const {
  std::vector<double> p(static_cast<std::size_t>(classes_));
  class_probabilities(x, p);
  return p;
}

void LinkModel::class_probabilities(std::span<const double> x,
                                    std::span<double> out) const {
  if (x.size() != static_cast<std::size_t>(slice_count()) ||
      out.size() != static_cast<std::size_t>(classes_))
    throw StructuralError("class_probabilities: size mismatch");
  double remaining = 1.0;
  for (int l = 0; l < slice_count(); ++l) {
    if (!std::isfinite(x[l]))
      throw DomainError("class_probabilities: non-finite input");
    out[l] = remaining * sigmoid(x[l]);
    remaining *= sigmoid(-x[l]);
  }
  out[classes_ - 1] = remaining;
}

void LinkModel::class_log_probabilities(std::span<const double> x,
                                        std::span<double> out) const {
  if (x.size() != static_cast<std::size_t>(slice_count()) ||
      out.size() != static_cast<std::size_t>(classes_))
    throw StructuralError("class_log_probabilities: size mismatch");
  double remaining = 0.0;
  for (int l = 0; l < slice_count(); ++l) {
    if (!std::isfinite(x[l]))
      throw DomainError("class_log_probabilities: non-finite input");
    out[l] = remaining - softplus(-x[l]);
    remaining -= softplus(x[l]);
  }
  out[classes_ - 1] = remaining;
}

double LinkModel::factor(int slice, int label, double x) const {
  check(slice, label);
  const int l = slice + 1;
  if (label < l) return 1.0;
  return label == l ? sigmoid(x) : sigmoid(-x);
}

double LinkModel::neg_log_lik_factor(int slice, int label, double x) const {
  check(slice, label);
  const int l = slice + 1;
  if (label < l) return 0.0;
  return label == l ? softplus(-x) : softplus(x);
}

double LinkModel::score(int slice, int label, double x) const {
  check(slice, label);
  const int l = slice + 1;
  if (label < l) return 0.0;
  return label == l ? sigmoid(-x) : -sigmoid(x);
}

double LinkModel::curvature(int slice, int label, double x) const {
  check(slice, label);
  if (label < slice + 1) return 0.0;
  return sigmoid(x) * sigmoid(-x);
}

namespace {

// sum_j (sqrt f^j(x) - sqrt f^j(y))^2 / |x - y|^2
double hellinger_ratio(const LinkModel& m, std::span<const double> x,
                       std::span<const double> y) {
  const auto px = m.class_probabilities(x);
  const auto py = m.class_probabilities(y);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < px.size(); ++j) {
    const double d = std::sqrt(px[j]) - std::sqrt(py[j]);
    num += d * d;
  }
  for (std::size_t l = 0; l < x.size(); ++l) den += (x[l] - y[l]) * (x[l] - y[l]);
  return num / den;
}

// Limit of hellinger_ratio as y -> x, minimized over directions:
// smallest eigenvalue of J^T J with J the Jacobian of sqrt f at x.
double hellinger_ratio_diagonal(const LinkModel& m, std::span<const double> x) {
  const int q = m.slice_count();
  const int k = m.classes();
  Eigen::MatrixXd jac(k, q);
  std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
  const double h = 1e-6;
  for (int l = 0; l < q; ++l) {
    xp[l] = x[l] + h;
    xm[l] = x[l] - h;
    const auto pp = m.class_probabilities(xp);
    const auto pm = m.class_probabilities(xm);
    for (int j = 0; j < k; ++j)
      jac(j, l) = (std::sqrt(pp[j]) - std::sqrt(pm[j])) / (2 * h);
    xp[l] = xm[l] = x[l];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac.transpose() * jac);
  return es.eigenvalues().minCoeff();
}

// Projected gradient descent on the 2q-dimensional box from one start.
double minimize_ratio_from(const LinkModel& m, std::vector<double> z,
                           double gamma) {
  const std::size_t q = static_cast<std::size_t>(m.slice_count());
  auto value = [&](const std::vector<double>& p) {
    std::span<const double> x(p.data(), q), y(p.data() + q, q);
    double den = 0.0;
    for (std::size_t l = 0; l < q; ++l) den += (x[l] - y[l]) * (x[l] - y[l]);
    if (den < 1e-14) return hellinger_ratio_diagonal(m, x);
    return hellinger_ratio(m, x, y);
  };
  auto project = [&](std::vector<double>& p) {
    for (double& c : p) c = std::clamp(c, -gamma, gamma);
  };
  project(z);
  double f = value(z);
  double step = gamma;
  std::vector<double> grad(z.size()), trial(z.size());
  for (int it = 0; it < 200 && step > 1e-10; ++it) {
    const double h = 1e-6;
    for (std::size_t c = 0; c < z.size(); ++c) {
      auto zp = z, zm = z;
      zp[c] += h;
      zm[c] -= h;
      grad[c] = (value(zp) - value(zm)) / (2 * h);
    }
    bool moved = false;
    while (step > 1e-10) {
      for (std::size_t c = 0; c < z.size(); ++c) trial[c] = z[c] - step * grad[c];
      project(trial);
      const double ft = value(trial);
      if (ft < f) {
        z = trial;
        f = ft;
        step *= 2;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return std::min(f, hellinger_ratio_diagonal(m, {z.data(), q}));
}

}  // namespace

LinkConstants LinkModel::constants(double gamma) const {
  if (!(gamma > 0) || !std::isfinite(gamma))
    throw DomainError("constants: gamma must be a positive finite number");
  LinkConstants c;
  // sup over |x| <= gamma of -log sigma(+-x) is softplus(gamma).
  c.H = 2.0 * softplus(gamma);
  // Scores are sigma(-x) or -sigma(x); both bounded by sigma(gamma).
  c.L = sigmoid(gamma);
  if (classes_ == 2) {
    // g(x) = sigma'(x)^2 / (8 sigma (1 - sigma)) = sigma(x)(1 - sigma(x)) / 8,
    // smallest at the box edge.
    c.K = sigmoid(gamma) * sigmoid(-gamma) / 8.0;
    return c;
  }

  const std::size_t q = static_cast<std::size_t>(slice_count());
  double best = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unif(-gamma, gamma);
  for (int s = 0; s < 32; ++s) {
    std::vector<double> z(2 * q);
    for (double& v : z) v = unif(rng);
    best = std::min(best, minimize_ratio_from(*this, std::move(z), gamma));
  }
  // Corner pairs.
  const std::size_t corners = std::size_t{1} << q;
  for (std::size_t a = 0; a < corners; ++a) {
    for (std::size_t b = 0; b < corners; ++b) {
      std::vector<double> z(2 * q);
      for (std::size_t l = 0; l < q; ++l) {
        z[l] = (a >> l & 1) ? gamma : -gamma;
        z[q + l] = (b >> l & 1) ? gamma : -gamma;
      }
      if (a == b) {
        best = std::min(best, hellinger_ratio_diagonal(*this, {z.data(), q}));
        continue;
      }
      best = std::min(best, hellinger_ratio(*this, {z.data(), q},
                                            {z.data() + q, q}));
    }
  }
  c.K = best;
  c.k_is_numerical_estimate = true;
  return c;
}

double hellinger_terms(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double d = std::sqrt(p[j]) - std::sqrt(q[j]);
    s += d * d;
  }
  return s;
}

double kl_terms_log(std::span<const double> p, std::span<const double> log_q) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] <= 0.0) continue;
    s += p[j] * (std::log(p[j]) - log_q[j]);
  }
  return s;
}

double kl_terms(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] <= 0.0) continue;
    if (q[j] <= 0.0) return std::numeric_limits<double>::infinity();
    s += p[j] * std::log(p[j] / q[j]);
  }
  return s;
}

namespace {

template <typename Term>
double average_over_entries(const LinkModel& model, const ParameterTensor& x,
                            const ParameterTensor& x2, Term term) {
  if (x.rows() != x2.rows() || x.cols() != x2.cols() ||
      x.slice_count() != x2.slice_count())
    throw StructuralError("divergence: tensor shapes differ");
  if (x.slice_count() != model.slice_count())
    throw StructuralError("divergence: slice count does not match the link");
  const auto q = static_cast<std::size_t>(model.slice_count());
  const auto k = static_cast<std::size_t>(model.classes());
  std::vector<double> a(q), b(q), pa(k), pb(k);
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      x.entry(r, c, a);
      x2.entry(r, c, b);
      model.class_probabilities(a, pa);
      model.class_probabilities(b, pb);
      total += term(pa, pb);
    }
  }
  return total / static_cast<double>(x.rows() * x.cols());
}

}  // namespace

double hellinger_sq(const LinkModel& model, const ParameterTensor& x,
                    const ParameterTensor& x2) {
  return average_over_entries(model, x, x2, hellinger_terms);
}

double kl_divergence(const LinkModel& model, const ParameterTensor& x,
                     const ParameterTensor& x2) {
  return average_over_entries(model, x, x2, kl_terms);
}

}  // namespace mcfa
