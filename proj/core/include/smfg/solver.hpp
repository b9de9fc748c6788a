#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "smfg/diagnostics.hpp"
#include "smfg/lbfgs.hpp"
#include "smfg/operator.hpp"

namespace smfg {

struct MinimizeResult {
  FeFunction u;
  std::vector<IterationRecord> trace;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;

  /// Set when the iteration cap (or a failed line search) stopped the run
  /// before tol_grad was met; `u` is then the best iterate found.
  bool max_iters_exceeded() const noexcept { return !converged; }
};

/// Minimizes the convex penalized energy from u0. The minimizer u yields the
/// stationary triplet (m_u, u, h_u) through complete_state().
MinimizeResult minimize_energy(const ProblemData& data, const FeFunction& u0, const SolverOptions& opts);

/// eps_k = eps_start * eps_factor^k, k = 0 .. eps_count - 1.
struct ContinuationSchedule {
  double eps_start = 0.2;
  double eps_factor = 0.5;
  std::size_t eps_count = 6;

  void validate() const;
  std::vector<double> epsilons() const;
};

struct ContinuationStage {
  SolutionState state;
  DiagnosticsReport diagnostics;
  std::vector<IterationRecord> trace;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Solves every stage of the schedule, warm-starting each from the previous
/// minimizer, and attaches diagnostics. `data` supplies everything except
/// epsilon. Stages that stop at the iteration cap are kept with
/// converged = false.
std::vector<ContinuationStage> continuation(const ProblemData& data, const ContinuationSchedule& schedule,
                                            const SolverOptions& opts, const DiagnosticsOptions& diag = {});

struct ReducedResult {
  FeFunction u_star;  // compatible representative u + kappa(u)
  std::vector<double> kappa_history;
  std::vector<IterationRecord> trace;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;

  /// |kappa_last - kappa_previous|; 0 with fewer than two entries.
  double kappa_drift() const;
};

/// Quotient-space path: descends on the mean-zero nodal subspace using the
/// reduced residual (kappa recomputed at every evaluation) and returns the
/// compatible representative.
ReducedResult solve_reduced(const ProblemData& data, const FeFunction& u0, const SolverOptions& opts);

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace);

}  // namespace smfg
