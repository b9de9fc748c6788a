#include "smfg/solver.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <utility>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "smfg/error.hpp"

namespace smfg {

MinimizeResult minimize_energy(const ProblemData& data, const FeFunction& u0, const SolverOptions& opts) {
  const Objective objective = [&data](std::span<const double> x, std::span<double> grad) {
    return energy_and_gradient(data, x, grad);
  };
  auto run = lbfgs_minimize(objective, std::vector<double>(u0.values().begin(), u0.values().end()), opts);
  MinimizeResult result{FeFunction(data.mesh(), std::move(run.x)), std::move(run.trace), run.iterations,
                        run.grad_norm, run.converged};
  return result;
}

void ContinuationSchedule::validate() const {
  if (!(eps_start > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps_start must be positive");
  if (!(eps_factor > 0.0 && eps_factor < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps_factor must lie in (0,1)");
  if (eps_count == 0) throw Error(ErrorCode::InvalidArgument, "eps_count must be positive");
}

std::vector<double> ContinuationSchedule::epsilons() const {
  std::vector<double> out;
  out.reserve(eps_count);
  double eps = eps_start;
  for (std::size_t k = 0; k < eps_count; ++k) {
    out.push_back(eps);
    eps *= eps_factor;
  }
  return out;
}

std::vector<ContinuationStage> continuation(const ProblemData& data, const ContinuationSchedule& schedule,
                                            const SolverOptions& opts, const DiagnosticsOptions& diag) {
  schedule.validate();
  std::vector<ContinuationStage> stages;
  FeFunction warm(data.mesh());
  for (double eps : schedule.epsilons()) {
    const ProblemData stage_data = data.with_epsilon(eps);
    MinimizeResult run = minimize_energy(stage_data, warm, opts);
    warm = run.u;
    ContinuationStage stage{complete_state(stage_data, std::move(run.u)), {}, std::move(run.trace), run.iterations,
                            run.converged};
    stage.diagnostics = diagnose(stage_data, stage.state, diag);
    stages.push_back(std::move(stage));
  }
  return stages;
}

double ReducedResult::kappa_drift() const {
  if (kappa_history.size() < 2) return 0.0;
  return std::abs(kappa_history.back() - kappa_history[kappa_history.size() - 2]);
}

ReducedResult solve_reduced(const ProblemData& data, const FeFunction& u0, const SolverOptions& opts) {
  // F(u) = I(u + kappa(u)) is invariant under constant shifts and its
  // gradient is the reduced residual, so descent can run on mean-zero vectors.
  const Objective objective = [&data](std::span<const double> x, std::span<double> grad) {
    double kappa = 0.0;
    const auto r = reduced_B_residual(data, x, &kappa);
    std::copy(r.begin(), r.end(), grad.begin());
    std::vector<double> shifted(x.begin(), x.end());
    for (double& v : shifted) v += kappa;
    return energy(data, shifted);
  };
  const Projector recenter = [](std::span<double> x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    for (double& v : x) v -= mean;
  };
  std::vector<double> kappas;
  const Observer observe = [&data, &kappas](const IterationRecord&, std::span<const double> x) {
    kappas.push_back(kappa_solve(data, x));
  };

  auto run = lbfgs_minimize(objective, std::vector<double>(u0.values().begin(), u0.values().end()), opts, recenter,
                            observe);
  const double kappa = kappas.empty() ? kappa_solve(data, run.x) : kappas.back();
  for (double& v : run.x) v += kappa;
  return ReducedResult{FeFunction(data.mesh(), std::move(run.x)), std::move(kappas), std::move(run.trace),
                       run.iterations, run.grad_norm, run.converged};
}

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace) {
  fmt::print(out, "iter,energy,grad_norm,step_length\n");
  for (const auto& r : trace) fmt::print(out, "{},{:.17g},{:.17g},{:.17g}\n", r.iter, r.energy, r.grad_norm, r.step_length);
}

}  // namespace smfg
