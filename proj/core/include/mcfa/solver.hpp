#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcfa/link.hpp"
#include "mcfa/loss.hpp"
#include "mcfa/sparse.hpp"
#include "mcfa/tensor_model.hpp"

namespace mcfa {

struct SolverConfig {
  double lambda = 0.0;
  /// Stopping precision; when unset, 1e-4 * Psi(0) of the problem.
  std::optional<double> epsilon;
  int max_outer_iters = 2000;
  double power_iter_tol = 1e-9;
  int power_iter_max = 500;
  SingularMethod singular_method = SingularMethod::lanczos;
  double support_reopt_tol = 1e-8;
  int support_reopt_max = 200;
  double line_search_tol = 1e-10;
  /// Support atoms with weight below this are dropped after reoptimization.
  double prune_threshold = 1e-12;
  std::uint64_t seed = 0;

  void validate() const;
};

/// (g_min, g_max_support): the smallest value of lambda + <grad, u v^T> over
/// all atoms, and the largest |lambda + <grad, M>| over the support.
struct Certificate {
  double g_min = 0.0;
  double g_max_support = 0.0;
};

struct FitReport {
  AtomicDecomposition decomposition;
  std::vector<double> objective_trace;
  Certificate final_certificate;
  int iterations = 0;
  int atoms_added = 0;
  int reoptimizations = 0;
  std::size_t peak_atoms = 0;
  bool converged = false;
  double lambda = 0.0;
  double epsilon = 0.0;
  /// max |W| over observed entries; the sup-norm bound is never enforced.
  double max_abs_entry = 0.0;
  std::chrono::duration<double> wall_time{0};
};

/// Result of minimizing the lifted objective over a fixed support.
struct ReoptResult {
  std::vector<double> weights;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes lambda * sum(w) + Psi(sum_k w_k M_k) over w >= 0 with the atoms
/// held fixed, starting from `start` (which must be feasible).
ReoptResult reoptimize_support(const SliceProblem& problem,
                               std::span<const Atom> atoms,
                               std::span<const double> start, double lambda,
                               double tol = 1e-8, int max_iter = 200);

/// Lifted coordinate gradient descent on Psi^l(X) + lambda |X|_{sigma,1}.
/// Each outer step either adds the atom given by the leading singular pair of
/// -grad Psi (with an exact line search on its weight) or, when no atom
/// improves by more than eps/2, reoptimizes the weights on the current
/// support. Stops once every support atom is eps-stationary.
FitReport solve_slice(const SliceProblem& problem, const SolverConfig& config,
                      const AtomicDecomposition* warm_start = nullptr);

/// One independent solve per slice of the conditional logit model.
/// `warm_starts`, when non-empty, holds one decomposition per slice.
std::vector<FitReport> solve_tensor(
    const ObservationSet& obs, const LinkModel& link, const SolverConfig& config,
    std::span<const AtomicDecomposition> warm_starts = {}, int threads = 1);

/// max_l |grad Psi^l(0)|_{sigma,inf}: the smallest lambda at which every
/// slice estimate is zero.
double null_lambda(std::span<const SliceProblem> problems);

}  // namespace mcfa
