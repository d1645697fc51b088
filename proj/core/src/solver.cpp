#include "mcfa/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>

#include "mcfa/errors.hpp"
#include "mcfa/parallel.hpp"

namespace mcfa {

void SolverConfig::validate() const {
  if (!(lambda > 0) || !std::isfinite(lambda))
    throw DomainError("SolverConfig: lambda must be positive and finite");
  if (epsilon && !(*epsilon > 0))
    throw DomainError("SolverConfig: epsilon must be positive");
  if (max_outer_iters < 1 || power_iter_max < 1 || support_reopt_max < 1)
    throw DomainError("SolverConfig: iteration caps must be positive");
  if (!(power_iter_tol > 0) || !(support_reopt_tol > 0) ||
      !(line_search_tol > 0) || !(prune_threshold >= 0))
    throw DomainError("SolverConfig: tolerances must be positive");
}

namespace {

using ColumnBlock = Eigen::Ref<const Eigen::MatrixXd>;

// Atom values u[row] v[col] at every observed entry.
Vector atom_column(const SliceProblem& p, const Atom& atom) {
  const auto entries = p.entries();
  Vector a(static_cast<Eigen::Index>(entries.size()));
  const double* u = atom.u().data();
  const double* v = atom.v().data();
  for (std::size_t e = 0; e < entries.size(); ++e)
    a[static_cast<Eigen::Index>(e)] = u[entries[e].row] * v[entries[e].col];
  return a;
}

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
std::span<double> as_span(Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double lifted_objective(const SliceProblem& p, double lambda,
                        const Vector& weights, const Vector& w_entries) {
  const double f = lambda * weights.sum() + p.objective(as_span(w_entries));
  if (!std::isfinite(f)) throw NumericalError("lifted objective is not finite");
  return f;
}

// Projected Newton (Bertsekas) on lambda * sum(w) + Psi(A w), w >= 0.
ReoptResult projected_newton(const SliceProblem& p, const ColumnBlock& a,
                             Vector w, double lambda, double tol,
                             int max_iter) {
  const Eigen::Index r = w.size();
  ReoptResult res;
  Vector z = a * w;
  double f = lifted_objective(p, lambda, w, z);
  Vector gv(z.size()), hv(z.size());

  for (int it = 0; it < max_iter; ++it) {
    p.gradient_values(as_span(z), as_span(gv));
    const Vector g = (a.transpose() * gv).array() + lambda;

    double violation = 0.0;
    for (Eigen::Index j = 0; j < r; ++j)
      violation = std::max(violation, w[j] > 0 ? std::abs(g[j]) : -g[j]);
    if (violation <= tol) {
      res.converged = true;
      break;
    }
    res.iterations = it + 1;

    p.curvature_values(as_span(z), as_span(hv));
    const Eigen::MatrixXd h = a.transpose() * (hv.asDiagonal() * a);

    const double step_gap = (w - (w - g).cwiseMax(0.0)).norm();
    const double active_eps = std::min(1e-6, step_gap);
    std::vector<Eigen::Index> free_idx;
    for (Eigen::Index j = 0; j < r; ++j)
      if (!(w[j] <= active_eps && g[j] > 0)) free_idx.push_back(j);

    Vector d = Vector::Zero(r);
    for (Eigen::Index j = 0; j < r; ++j)
      d[j] = -g[j] / std::max(h(j, j), 1e-300);
    if (!free_idx.empty()) {
      const auto nf = static_cast<Eigen::Index>(free_idx.size());
      Eigen::MatrixXd hf(nf, nf);
      Vector gf(nf);
      for (Eigen::Index i = 0; i < nf; ++i) {
        gf[i] = g[free_idx[i]];
        for (Eigen::Index k = 0; k < nf; ++k)
          hf(i, k) = h(free_idx[i], free_idx[k]);
      }
      const double ridge = 1e-12 * std::max(hf.diagonal().maxCoeff(), 1e-300);
      hf.diagonal().array() += ridge;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hf);
      Vector df = ldlt.solve(-gf);
      if (ldlt.info() == Eigen::Success && df.allFinite() && df.dot(gf) < 0)
        for (Eigen::Index i = 0; i < nf; ++i) d[free_idx[i]] = df[i];
    }

    auto try_direction = [&](const Vector& dir) {
      double alpha = 1.0;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        Vector wn = (w + alpha * dir).cwiseMax(0.0);
        Vector zn = a * wn;
        const double fn = lifted_objective(p, lambda, wn, zn);
        if (fn <= f + 1e-4 * g.dot(wn - w) && fn <= f) {
          w = std::move(wn);
          z = std::move(zn);
          f = fn;
          return true;
        }
      }
      return false;
    };
    if (!try_direction(d)) {
      const Vector sd = -g / std::max(h.diagonal().maxCoeff(), 1e-300);
      if (!try_direction(sd)) break;
    }
  }
  res.weights.assign(w.data(), w.data() + r);
  res.objective = f;
  return res;
}

// Exact minimization of phi(b) = lambda b + Psi(W + b a) over b >= 0.
// Requires phi'(0) < 0.
double line_search(const SliceProblem& p, const Vector& w, const Vector& a,
                   double lambda, double tol) {
  Vector z(w.size()), gv(w.size()), hv(w.size());
  auto derivs = [&](double b, double& d1, double& d2) {
    z = w + b * a;
    p.gradient_values(as_span(z), as_span(gv));
    p.curvature_values(as_span(z), as_span(hv));
    d1 = lambda + gv.dot(a);
    d2 = hv.dot(a.cwiseProduct(a));
  };
  double lo = 0.0, d1_lo, d2_lo;
  derivs(lo, d1_lo, d2_lo);
  if (d1_lo >= 0) return 0.0;

  double hi = d2_lo > 0 ? -d1_lo / d2_lo : 1.0;
  double d1_hi, d2_hi;
  int doublings = 0;
  while (true) {
    derivs(hi, d1_hi, d2_hi);
    if (!std::isfinite(d1_hi)) throw NumericalError("line search: non-finite derivative");
    if (std::abs(d1_hi) <= tol) return hi;
    if (d1_hi > 0) break;
    lo = hi;
    d1_lo = d1_hi;
    d2_lo = d2_hi;
    hi *= 2.0;
    if (++doublings > 200) throw NumericalError("line search: objective unbounded below");
  }

  for (int it = 0; it < 200; ++it) {
    double b = lo - d1_lo / d2_lo;
    if (!(d2_lo > 0) || !(b > lo && b < hi)) b = 0.5 * (lo + hi);
    double d1, d2;
    derivs(b, d1, d2);
    if (std::abs(d1) <= tol) return b;
    if (d1 < 0) {
      lo = b;
      d1_lo = d1;
      d2_lo = d2;
    } else {
      hi = b;
    }
    if (hi - lo <= 1e-15 * hi) return lo;
  }
  return lo;
}

// Atoms of the current iterate together with their values at the entries.
class LiftedState {
 public:
  LiftedState(const SliceProblem& p) : p_(p), w_(Vector::Zero(ne())) {}

  Eigen::Index ne() const { return static_cast<Eigen::Index>(p_.entry_count()); }
  std::size_t size() const { return atoms_.size(); }
  const Vector& entry_values() const { return w_; }
  Vector weights() const {
    return Eigen::Map<const Vector>(weights_.data(),
                                    static_cast<Eigen::Index>(weights_.size()));
  }
  ColumnBlock columns() const {
    return static_cast<const Eigen::MatrixXd&>(a_).leftCols(
        static_cast<Eigen::Index>(atoms_.size()));
  }

  void add(Atom atom, const Vector& column, double weight) {
    const auto r = static_cast<Eigen::Index>(atoms_.size());
    if (r == a_.cols()) {
      Eigen::MatrixXd grown(ne(), std::max<Eigen::Index>(8, 2 * r));
      grown.leftCols(r) = a_.leftCols(r);
      a_.swap(grown);
    }
    a_.col(r) = column;
    atoms_.push_back(std::move(atom));
    weights_.push_back(weight);
    w_ += weight * column;
  }

  void set_weights(std::span<const double> weights, double prune) {
    std::size_t out = 0;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      if (weights[k] < prune || weights[k] <= 0.0) continue;
      if (out != k) {
        atoms_[out] = std::move(atoms_[k]);
        a_.col(static_cast<Eigen::Index>(out)) = a_.col(static_cast<Eigen::Index>(k));
      }
      weights_[out] = weights[k];
      ++out;
    }
    atoms_.erase(atoms_.begin() + static_cast<std::ptrdiff_t>(out), atoms_.end());
    weights_.resize(out);
    w_ = columns() * this->weights();
  }

  AtomicDecomposition decomposition() const {
    return AtomicDecomposition(p_.rows(), p_.cols(), atoms_, weights_);
  }

 private:
  const SliceProblem& p_;
  Eigen::MatrixXd a_;
  std::vector<Atom> atoms_;
  std::vector<double> weights_;
  Vector w_;
};

}  // namespace

ReoptResult reoptimize_support(const SliceProblem& problem,
                               std::span<const Atom> atoms,
                               std::span<const double> start, double lambda,
                               double tol, int max_iter) {
  if (atoms.size() != start.size())
    throw StructuralError("reoptimize_support: atoms/weights length mismatch");
  if (!(lambda > 0)) throw DomainError("reoptimize_support: lambda must be > 0");
  for (double s : start)
    if (!(s >= 0)) throw DomainError("reoptimize_support: start must be >= 0");
  const auto ne = static_cast<Eigen::Index>(problem.entry_count());
  Eigen::MatrixXd a(ne, static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t k = 0; k < atoms.size(); ++k)
    a.col(static_cast<Eigen::Index>(k)) = atom_column(problem, atoms[k]);
  const Vector w0 = Eigen::Map<const Vector>(start.data(),
                                             static_cast<Eigen::Index>(start.size()));
  return projected_newton(problem, a, w0, lambda, tol, max_iter);
}

FitReport solve_slice(const SliceProblem& problem, const SolverConfig& config,
                      const AtomicDecomposition* warm_start) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const double lambda = config.lambda;

  FitReport report;
  report.lambda = lambda;
  report.epsilon = config.epsilon.value_or(1e-4 * problem.zero_objective());
  if (!(report.epsilon > 0)) report.epsilon = 1e-12;
  const double eps = report.epsilon;

  LiftedState state(problem);
  if (warm_start) {
    if (warm_start->rows() != problem.rows() || warm_start->cols() != problem.cols())
      throw StructuralError("solve_slice: warm start shape mismatch");
    const auto atoms = warm_start->atoms();
    const auto weights = warm_start->weights();
    for (std::size_t k = 0; k < atoms.size(); ++k)
      if (weights[k] > 0)
        state.add(atoms[k], atom_column(problem, atoms[k]), weights[k]);
  }

  double objective = lifted_objective(problem, lambda, state.weights(),
                                      state.entry_values());
  report.objective_trace.push_back(objective);
  report.peak_atoms = state.size();

  Vector gv(state.ne());
  for (int k = 0; k < config.max_outer_iters; ++k) {
    report.iterations = k + 1;
    problem.gradient_values(as_span(state.entry_values()), as_span(gv));
    const SparseMatrix grad(problem.rows(), problem.cols(), problem.pattern(),
                            std::vector<double>(gv.begin(), gv.end()));
    auto pair = top_singular_pair(grad, config.power_iter_tol,
                                  config.power_iter_max,
                                  config.seed * 0x9e3779b97f4a7c15ULL + k,
                                  config.singular_method);

    // <grad, u v^T> = -sigma after orienting u against the gradient.
    const double g_k = pair.zero ? lambda : lambda - pair.sigma;
    report.final_certificate.g_min = g_k;

    if (g_k <= -eps / 2) {
      Atom atom(-pair.u, pair.v);
      const Vector column = atom_column(problem, atom);
      const double beta = line_search(problem, state.entry_values(), column,
                                      lambda, config.line_search_tol);
      if (beta > 0) {
        state.add(std::move(atom), column, beta);
        ++report.atoms_added;
        report.peak_atoms = std::max(report.peak_atoms, state.size());
        objective = lifted_objective(problem, lambda, state.weights(),
                                     state.entry_values());
        report.objective_trace.push_back(objective);
        continue;
      }
    }

    double g_max = 0.0;
    Vector support_grad;
    if (state.size() > 0) {
      support_grad = (state.columns().transpose() * gv).array() + lambda;
      g_max = support_grad.cwiseAbs().maxCoeff();
    }
    report.final_certificate.g_max_support = g_max;
    if (g_max <= eps) {
      report.converged = true;
      break;
    }

    const Vector w0 = state.weights();
    auto reopt = projected_newton(problem, state.columns(), w0, lambda,
                                  config.support_reopt_tol,
                                  config.support_reopt_max);
    ++report.reoptimizations;
    if (reopt.objective > objective) {
      // Never accept an ascent step from the inner solver.
      reopt.weights.assign(w0.data(), w0.data() + w0.size());
    }
    state.set_weights(reopt.weights, config.prune_threshold);
    objective = lifted_objective(problem, lambda, state.weights(),
                                 state.entry_values());
    report.objective_trace.push_back(objective);
  }

  report.decomposition = state.decomposition();
  if (state.ne() > 0)
    report.max_abs_entry = state.entry_values().cwiseAbs().maxCoeff();
  report.wall_time = std::chrono::steady_clock::now() - t0;
  return report;
}

std::vector<FitReport> solve_tensor(const ObservationSet& obs,
                                    const LinkModel& link,
                                    const SolverConfig& config,
                                    std::span<const AtomicDecomposition> warm_starts,
                                    int threads) {
  const int q = link.slice_count();
  if (!warm_starts.empty() && warm_starts.size() != static_cast<std::size_t>(q))
    throw StructuralError("solve_tensor: need one warm start per slice");
  std::vector<FitReport> reports(static_cast<std::size_t>(q));
  parallel_for(static_cast<std::size_t>(q), threads, [&](std::size_t l) {
    const auto problem = SliceProblem::multinomial(obs, link, static_cast<int>(l));
    reports[l] = solve_slice(problem, config,
                             warm_starts.empty() ? nullptr : &warm_starts[l]);
  });
  return reports;
}

double null_lambda(std::span<const SliceProblem> problems) {
  double ceiling = 0.0;
  for (const auto& p : problems) {
    const std::vector<double> zero(p.entry_count(), 0.0);
    ceiling = std::max(ceiling, gradient_operator_norm(p.gradient(zero)));
  }
  return ceiling;
}

}  // namespace mcfa
