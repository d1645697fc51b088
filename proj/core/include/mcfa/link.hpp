#pragma once

#include <span>
#include <vector>

#include "mcfa/tensor_model.hpp"

namespace mcfa {

/// Constants bounding the link on the box |x| <= gamma.
struct LinkConstants {
  double H = 0.0;  ///< 2 sup |log g|
  double L = 0.0;  ///< sup |g'/g|
  double K = 0.0;  ///< curvature constant (an infimum; anything smaller is also admissible)
  bool k_is_numerical_estimate = false;
};

/// Conditional multinomial logit over K classes:
///
///   P(Y = 1)            = sigma(x^1)
///   P(Y = j | Y > j-1)  = sigma(x^j),   j = 2..K-1
///
/// so f^j(x) = prod_l g^l_j(x_l) with, for slice l (1-based),
///   g^l_j(x) = 1          if j < l
///            = sigma(x)   if j = l
///            = sigma(-x)  if j > l.
/// K = 2 is the binomial logit.
///
/// Slices are 0-based (`slice` = l - 1); labels are the 1-based classes.
class LinkModel {
 public:
  explicit LinkModel(int classes);

  int classes() const noexcept { return classes_; }
  int slice_count() const noexcept { return classes_ - 1; }

  /// f(x) for x of length q. Throws DomainError on non-finite input.
  std::vector<double> class_probabilities(std::span<const double> x) const;
  void class_probabilities(std::span<const double> x,
                           std::span<double> out) const;
  /// log f(x), finite wherever x is.
  void class_log_probabilities(std::span<const double> x,
                               std::span<double> out) const;

  /// g^l_j(x).
  double factor(int slice, int label, double x) const;
  /// -log g^l_j(x).
  double neg_log_lik_factor(int slice, int label, double x) const;
  /// (g^l_j)'(x) / g^l_j(x).
  double score(int slice, int label, double x) const;
  /// d^2/dx^2 of -log g^l_j(x).
  double curvature(int slice, int label, double x) const;

  /// H, L, K for the box |x|_inf <= gamma. Closed form for K = 2;
  /// for more classes K is a multistart numerical estimate.
  LinkConstants constants(double gamma) const;

 private:
  void check(int slice, int label) const;

  int classes_;
};

double sigmoid(double x);
/// log(1 + e^x) without overflow.
double softplus(double x);

/// Squared Hellinger distance between f(X) and f(X2), averaged over entries.
double hellinger_sq(const LinkModel& model, const ParameterTensor& x,
                    const ParameterTensor& x2);
/// KL(f(X) || f(X2)), averaged over entries.
double kl_divergence(const LinkModel& model, const ParameterTensor& x,
                     const ParameterTensor& x2);

/// Per-entry distance terms for two probability vectors.
double hellinger_terms(std::span<const double> p, std::span<const double> q);
double kl_terms(std::span<const double> p, std::span<const double> q);
/// KL terms from log q, finite where q underflows.
double kl_terms_log(std::span<const double> p, std::span<const double> log_q);

}  // namespace mcfa
