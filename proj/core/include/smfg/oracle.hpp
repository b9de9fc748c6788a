#pragma once

#include <cstddef>
#include <iosfwd>

#include "smfg/model.hpp"
#include "smfg/operator.hpp"

namespace smfg {

/// Exact solution on (0,1) with Neumann inflow j0 at x = 0 and the exit at
/// x = 1. The value function is affine and the density constant.
struct Oracle1DSolution {
  double p_star = 0.0;
  double m_star = 0.0;
  double u_at_exit = 0.0;
  double exit_flux = 0.0;

  double profile(double x) const noexcept { return p_star * (x - 1.0) + u_at_exit; }
};

/// Bisection for g_inv(H(p)) H_p(p) = -j0 on p < 0. The bracket is
/// [-P, -1e-14] with P doubling from 1. tol = 0 bisects to full resolution.
/// Throws Error{NoRoot} when -j0 cannot be bracketed and
/// Error{InvalidArgument} for j0 <= 0, eps <= 0 or an x-dependent H.
Oracle1DSolution solve_oracle_1d(const HamiltonianModel& ham, const CouplingModel& coupling,
                                 const ExponentConfig& cfg, double j0, double eps, double tol = 0.0);

/// Minimum of pairing_A_eps(state, (mu - m, v - u, k - h)) over the lattice
///   state + spacing * {-(r-1)/2, ..., (r-1)/2}^components
/// with mu and k clipped at zero. Cost is resolution^(elements + nodes + exits),
/// so instances with more than 6 vertices throw Error{InstanceTooLarge}.
double brute_force_vi(const ProblemData& data, const SolutionState& state, std::size_t resolution,
                      double spacing = 1.0);

/// Largest sup-norm |v - u| on the lattice used by brute_force_vi.
double brute_force_lattice_diameter(std::size_t resolution, double spacing = 1.0);

/// x,u,Du,m on `points` equispaced samples of [0,1].
void write_oracle_csv(std::ostream& out, const Oracle1DSolution& sol, std::size_t points);

}  // namespace smfg
