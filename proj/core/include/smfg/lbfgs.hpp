#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace smfg {

struct SolverOptions {
  double tol_grad = 1e-8;  // sup-norm of the gradient
  std::size_t max_iters = 5000;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step = 1.0;
  std::size_t memory = 20;  // 0 = steepest descent

  /// Throws Error{InvalidArgument} when a field is out of range.
  void validate() const;
};

struct IterationRecord {
  std::size_t iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double step_length = 0.0;
};

/// Value-and-gradient callback: returns f(x) and writes grad f(x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Optional map applied to every accepted iterate (e.g. re-centering onto a
/// subspace on which the objective is invariant).
using Projector = std::function<void(std::span<double> x)>;

/// Called once per accepted iterate (including the starting point).
using Observer = std::function<void(const IterationRecord& record, std::span<const double> x)>;

struct DescentResult {
  std::vector<double> x;
  std::vector<IterationRecord> trace;
  double value = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Limited-memory BFGS with Armijo backtracking. Falls back to steepest
/// descent whenever the quasi-Newton direction is not a descent direction or
/// its line search fails. Accepted steps never raise the objective by more
/// than the rounding level 64 eps (|f| + 1).
DescentResult lbfgs_minimize(const Objective& objective, std::vector<double> x0, const SolverOptions& opts,
                             const Projector& project = {}, const Observer& observe = {});

}  // namespace smfg
