#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "smfg/operator.hpp"

namespace smfg {

struct DiagnosticsReport {
  double epsilon = 0.0;
  double flux_gap = 0.0;
  double energy_identity_residual = 0.0;
  double complementarity_mass = 0.0;
  double apriori_value = 0.0;
  double minty_gap = 0.0;
  double minty_span = 0.0;  // max |v - u|_1 over the Minty samples
  double monotonicity_min = 0.0;
  double normal_trace_gap = 0.0;
  double grad_norm = 0.0;

  bool all_finite() const;
};

/// Column order of diagnostics CSV rows; fixed.
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsReport& report);

/// sum_D w h - sum_N w j (the gradient paired with v = 1).
double flux_balance(const ProblemData& data, const SolutionState& state);

/// |sum_T |T| m D_pH.Du + eps^{-gamma} sum_D w u_+^gamma - sum_N w j u|.
double energy_identity(const ProblemData& data, const SolutionState& state);

/// sum_D w h u_+.
double complementarity_mass(const ProblemData& data, const SolutionState& state);

/// eps^{gamma'} sum_D w h^{gamma'}: the same quantity through h alone.
double complementarity_mass_from_flux(const ProblemData& data, const SolutionState& state);

/// eps^{-gamma} sum_D w u_+^gamma + sum_T |T| |Du|^gamma.
double apriori_bound(const ProblemData& data, const SolutionState& state);

struct NormalTraceResult {
  /// 1D: max over Dirichlet endpoints of |h + q . nu| with q = m D_pH(Du) on
  /// the adjacent element. 2D: sum over Dirichlet vertices of
  /// |w h - weak outward flux|, the weak flux being minus q paired with the
  /// vertex's hat function plus its Neumann inflow.
  double boundary_gap = 0.0;
  /// 1D: max_T q_T - min_T q_T. 2D: max over interior vertices of |gradient|.
  double interior_defect = 0.0;

  double worst() const { return boundary_gap > interior_defect ? boundary_gap : interior_defect; }
};

NormalTraceResult normal_trace_check(const ProblemData& data, const SolutionState& state);

/// Minimum of <A X - A Y, X - Y> over random admissible pairs with m and h
/// drawn independently of u. A quarter of the pairs share u, a quarter share
/// m, a quarter share h, so that each row of the operator is also probed in
/// isolation.
double monotonicity_probe(const ProblemData& data, std::size_t samples, std::uint64_t seed);

/// <A X - A Y, X - Y> for two explicit states.
double monotonicity_pairing(const ProblemData& data, const SolutionState& x, const SolutionState& y);

/// max_i |fd_i - g_i| / max(|g|_inf, 1e-300) for central differences of
/// energy() with step delta against gradient().
double gradient_fd_error(const ProblemData& data, std::span<const double> u, double delta);

/// Worst gradient_fd_error over `states` random nodal vectors with N(0,1)
/// entries.
double gradient_check(const ProblemData& data, std::size_t states, double delta, std::uint64_t seed);

struct DiagnosticsOptions {
  std::size_t minty_samples = 1000;
  std::size_t monotonicity_samples = 200;
  std::uint64_t seed = 0;
};

DiagnosticsReport diagnose(const ProblemData& data, const SolutionState& state, const DiagnosticsOptions& opts = {});

}  // namespace smfg
