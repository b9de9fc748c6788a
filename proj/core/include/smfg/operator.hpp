#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "smfg/mesh.hpp"
#include "smfg/model.hpp"

namespace smfg {

/// Everything that defines one penalized problem at a fixed epsilon.
///
/// `j` is nodal over all vertices and vanishes off the Neumann portion.
/// Construction validates j >= 0, sum_{Gamma_N} w j > 0 and epsilon > 0.
class ProblemData {
 public:
  ProblemData(std::shared_ptr<const Mesh> mesh, HamiltonianModel ham, CouplingModel coupling,
              ExponentConfig cfg, std::vector<double> j, double epsilon);

  const Mesh& mesh() const noexcept { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return mesh_; }
  const HamiltonianModel& hamiltonian() const noexcept { return ham_; }
  const CouplingModel& coupling() const noexcept { return coupling_; }
  const ExponentConfig& exponents() const noexcept { return cfg_; }
  std::span<const double> inflow() const noexcept { return j_; }
  double epsilon() const noexcept { return epsilon_; }

  const BoundaryWeights& neumann() const noexcept { return mesh_->neumann_weights(); }
  const BoundaryWeights& dirichlet() const noexcept { return mesh_->dirichlet_weights(); }

  /// J = sum_{Gamma_N} w_i j_i
  double inflow_total() const noexcept { return inflow_total_; }

  ProblemData with_epsilon(double epsilon) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  HamiltonianModel ham_;
  CouplingModel coupling_;
  ExponentConfig cfg_;
  std::vector<double> j_;
  double epsilon_;
  double inflow_total_ = 0.0;
};

/// Triplet (m, u, h): elementwise density, nodal value function, and the
/// exit flux at the Dirichlet vertices (ordered as data.dirichlet().nodes).
struct SolutionState {
  FeFunction u;
  std::vector<double> m;
  std::vector<double> h;
  double epsilon = 0.0;
};

/// Test direction (mu, v, k) with the same layout as SolutionState.
/// Admissible (in the nonnegative cone) when mu >= 0 and k >= 0.
struct TestTriplet {
  std::vector<double> mu;
  std::vector<double> v;
  std::vector<double> k;

  bool admissible() const;
};

/// Discrete penalized energy
///   sum_T |T| G(H(x_T, Du_T)) - sum_N w j u + (gamma eps^gamma)^{-1} sum_D w u_+^gamma.
double energy(const ProblemData& data, std::span<const double> u);

/// Nodal gradient of energy(); equals the u-row of A_eps at the recovered
/// (m_u, u, h_u).
std::vector<double> gradient(const ProblemData& data, std::span<const double> u);

/// energy() and gradient() together.
double energy_and_gradient(const ProblemData& data, std::span<const double> u, std::span<double> grad);

/// m_T = g_inv(H(x_T, Du_T)).
std::vector<double> recover_density(const ProblemData& data, std::span<const double> u);

/// h_i = eps^{-gamma} (u_i)_+^{gamma - 1} at the Dirichlet vertices.
std::vector<double> recover_boundary_flux(const ProblemData& data, std::span<const double> u);

/// State with m and h recovered from u.
SolutionState complete_state(const ProblemData& data, FeFunction u);

/// Five-term pairing <A_eps(m,u,h), (mu,v,k)>. `state` need not be
/// consistent with u; this is what the monotonicity probe relies on.
double pairing_A_eps(const ProblemData& data, const SolutionState& state, const TestTriplet& t);

/// Limit operator A_0: as pairing_A_eps without the eps h^{gamma'-1} term.
/// The boundary flux is represented by the same nodal vector.
double pairing_A_zero(const ProblemData& data, const SolutionState& state, const TestTriplet& t);

/// Unique kappa with |sum_D w (u + kappa)_+^{gamma-1} - eps^gamma J| <= tol,
/// by bracket expansion and bisection. tol = 0 bisects until the bracket
/// cannot shrink further.
double kappa_solve(const ProblemData& data, std::span<const double> u, double tol = 0.0);

/// Reduced residual: the nodal vector of v -> <B u, v> with the compatible
/// representative u* = u + kappa(u). Annihilates constants to kappa tolerance.
std::vector<double> reduced_B_residual(const ProblemData& data, std::span<const double> u, double* kappa_out = nullptr);

double reduced_B_pairing(const ProblemData& data, std::span<const double> u, std::span<const double> v);

/// Minimum of pairing_A_eps(state, (mu - m, v - u, k - h)) over `samples`
/// random admissible triplets (|N(0,1)| for mu and k, N(0,1) for v).
/// Returns +infinity for samples == 0. `span_out` receives max_s |v_s - u|_1,
/// the scale of the gradient-tolerance term in the converged-state bound.
double minty_gap(const ProblemData& data, const SolutionState& state, std::size_t samples, std::uint64_t seed,
                 double* span_out = nullptr);

/// Sum of |T| |Du_T|^gamma; the gamma-th power of the quotient norm.
double quotient_norm_pow(const ProblemData& data, std::span<const double> u);
double quotient_norm(const ProblemData& data, std::span<const double> u);

}  // namespace smfg
